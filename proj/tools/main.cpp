#include <CLI11.hpp>
#include <iostream>

#include "sitnikov/app.hpp"
#include "sitnikov/error.hpp"

namespace {

using sitnikov::app::RunConfig;

void add_common(CLI::App* sub, RunConfig& c, std::string& ensemble_file) {
  sub->add_option("--builtin", c.source.builtin, "circular:N[:D], kepler:E, nbody:N or nbody-kepler:E");
  sub->add_option("--file", c.source.file, "trajectory CSV t,x1,y1,...");
  sub->add_option("--spec", c.source.spec, "JSON sidecar {masses,d,zeta1,zeta2,R}");
  sub->add_option("--ensemble", ensemble_file, "JSON file naming a builtin or a file/spec pair");
  sub->add_option("--p", c.ps, "index p (comma separated for several)")->delimiter(',');
  sub->add_option("--q", c.qs, "index q (comma separated for several)")->delimiter(',');
  sub->add_option("--tol-integrator", c.tol.integrator);
  sub->add_option("--tol-corrector", c.tol.corrector);
  sub->add_option("--tol-certification", c.tol.certification);
  sub->add_option("--tol-ode", c.tol.ode);
  sub->add_option("--tol-symmetry", c.tol.symmetry);
  sub->add_option("--m-user", c.m_user, "sup-norm bound that stops a branch (default 1e3 zeta0)");
  sub->add_option("--epsilon1", c.epsilon1, "collapse threshold (default 1e-6 zeta0)");
  sub->add_flag("--relaxed-symmetry", c.relaxed_symmetry, "allow even p with evenness only");
  sub->add_option("--out", c.out_dir, "output directory");
  sub->add_option("--threads", c.threads);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Symmetric periodic satellite orbits of generalized Sitnikov problems"};
  app.set_version_flag("--version", std::string(SITNIKOV_VERSION));
  app.require_subcommand(1);
  RunConfig c;
  std::string ensemble_file;

  struct Sub {
    const char* name;
    const char* help;
  };
  const Sub subs[] = {
      {"certify", "certify the dihedral symmetry of the primaries"},
      {"bounds", "bounds m, M of the weight F and excluded indices"},
      {"period-table", "period function of the circularized problem (CSV E,zeta,T)"},
      {"seed", "seed orbits at lambda = 0"},
      {"continue", "continue seeds to lambda = 1"},
      {"spectrum", "Neumann Sturm-Liouville eigenvalues and comparison bounds"},
      {"verify", "verify orbits at lambda = 1 (or a given --zeta/--lambda)"},
      {"nbody", "integrate primaries and write a trajectory table"},
      {"pipeline", "seed, continue, verify and spectra for every index"},
  };
  for (const auto& s : subs) {
    CLI::App* sub = app.add_subcommand(s.name, s.help);
    add_common(sub, c, ensemble_file);
    const std::string name = s.name;
    if (name == "spectrum") {
      sub->add_option("--lambda", c.lambdas, "lambda values")->delimiter(',');
      sub->add_option("--p-max", c.p_max, "highest index (default ceil(sqrt(M)) q + 2)");
    }
    if (name == "period-table") sub->add_option("--rows", c.rows);
    if (name == "nbody") sub->add_option("--intervals", c.intervals, "output intervals over [0, pi]");
    if (name == "verify") {
      sub->add_option("--zeta", c.zeta, "amplitude to verify directly");
      sub->add_option("--lambda", c.lambda, "homotopy parameter for --zeta");
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sitnikov::app::kExitInput;
  }
  for (const CLI::App* sub : app.get_subcommands()) c.command = sub->get_name();
  if (!ensemble_file.empty()) {
    try {
      c.source = sitnikov::app::read_ensemble_file(ensemble_file);
    } catch (const sitnikov::Error& e) {
      std::cerr << "error: " << e.what() << '\n';
      return sitnikov::app::kExitInput;
    }
  }
  return sitnikov::app::run(c);
}
