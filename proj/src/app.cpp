#include "sitnikov/app.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "sitnikov/conservative.hpp"
#include "sitnikov/continuation.hpp"
#include "sitnikov/error.hpp"
#include "sitnikov/field.hpp"
#include "sitnikov/shooting.hpp"
#include "sitnikov/spectral.hpp"

namespace sitnikov::app {

namespace fs = std::filesystem;
using io::Json;

namespace {

int exit_code_for(ErrorCode code) { return is_input_error(code) ? kExitInput : kExitNumerical; }

double parse_double(const std::string& s, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (s.empty() || used != s.size() || !std::isfinite(v)) {
    throw Error(ErrorCode::kInvalidArgument, what + ": not a number: '" + s + "'");
  }
  return v;
}

int parse_int(const std::string& s, const std::string& what) {
  const double v = parse_double(s, what);
  if (v != std::floor(v) || std::abs(v) > 1e6) {
    throw Error(ErrorCode::kInvalidArgument, what + ": not an integer: '" + s + "'");
  }
  return static_cast<int>(v);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(s);
  while (std::getline(ss, cell, sep)) out.push_back(cell);
  return out;
}

std::string index_stem(const std::string& stem, int p, int q) {
  return stem + "_p" + std::to_string(p) + "_q" + std::to_string(q);
}

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body) {
  const auto workers = static_cast<std::size_t>(std::clamp(threads, 1, 64));
  if (workers == 1 || count < 2) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::future<void>> jobs;
  for (std::size_t w = 0; w < std::min(workers, count); ++w) {
    jobs.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    }));
  }
  for (auto& j : jobs) j.get();
}

// -- configuration plumbing --------------------------------------------------

ShotOptions shot_options(const RunConfig& c) {
  ShotOptions s;
  s.integrator.rtol = c.tol.integrator;
  s.integrator.atol = c.tol.integrator;
  return s;
}

SeedOptions seed_options(const RunConfig& c) {
  SeedOptions s;
  s.relaxed_symmetry = c.relaxed_symmetry;
  s.shot = shot_options(c);
  s.symmetry_tolerance = c.tol.symmetry;
  return s;
}

ContinuationConfig continuation_config(const RunConfig& c) {
  ContinuationConfig k;
  k.corrector_tolerance = c.tol.corrector;
  k.m_user = c.m_user;
  k.epsilon1 = c.epsilon1;
  k.shot = shot_options(c);
  return k;
}

VerificationTolerances verification_tolerances(const RunConfig& c) { return {c.tol.ode, c.tol.symmetry}; }

// -- report fragments ----------------------------------------------------------

Json envelope(const RunConfig& c) {
  Json j;
  j["command"] = c.command;
  j["version"] = std::string(io::library_version());
  j["config_hash"] = c.hash();
  j["config"] = c.to_json();
  return j;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

Json ensemble_json(const PrimaryEnsemble& e) {
  Json j;
  j["label"] = e.label();
  j["bodies"] = e.size();
  j["masses"] = e.masses();
  Json reps = Json::array();
  for (const auto& o : e.orbits()) reps.push_back(std::string(o.representation()));
  j["representations"] = reps;
  j["symmetry"] = io::to_json(e.symmetry());
  j["certificate"] = io::to_json(e.certificate());
  j["constants"] = io::to_json(e.constants());
  return j;
}

Json bounds_json(const FieldBounds& b) {
  Json j;
  j["m"] = b.m;
  j["M"] = b.M;
  j["scan_m"] = b.scan_m;
  j["scan_M"] = b.scan_M;
  j["t_samples"] = b.t_samples;
  j["lambda_samples"] = b.lambda_samples;
  return j;
}

Json level_json(const EnergyLevel& l) {
  Json j;
  j["energy"] = l.energy;
  j["amplitude"] = l.amplitude;
  j["period"] = l.period;
  return j;
}

Json seed_json(const SeedSolution& s) {
  Json j;
  j["p"] = s.p;
  j["q"] = s.q;
  j["level"] = level_json(s.level);
  j["zero_count"] = s.zero_count;
  j["relaxed"] = s.relaxed;
  j["energy_drift"] = s.energy_drift;
  j["window_residual"] = s.window_residual;
  j["derivative_wrt_amplitude"] = s.derivative_wrt_amplitude;
  j["evenness"] = s.profile.residuals.evenness;
  j["antiperiodicity"] = s.profile.residuals.antiperiodicity;
  j["midpoint_zero"] = s.profile.residuals.midpoint_zero;
  return j;
}

Json point_json(const BranchPoint& p) {
  Json j;
  j["record"] = "point";
  j["lambda"] = p.lambda;
  j["zeta"] = p.zeta;
  j["residual"] = p.residual;
  j["dR_dzeta"] = p.dR_dzeta;
  j["dR_dlambda"] = p.dR_dlambda;
  j["zero_count"] = p.zero_count;
  j["winding_integral"] = p.winding_integral;
  j["sign_changes"] = p.sign_changes;
  j["sup_norm"] = p.sup_norm;
  j["step"] = p.step_taken;
  j["newton_iterations"] = p.newton_iterations;
  j["arclength"] = p.arclength;
  return j;
}

Json branch_header(const RunConfig& c, const Branch& b) {
  Json j;
  j["record"] = "header";
  j["version"] = std::string(io::library_version());
  j["config_hash"] = c.hash();
  j["p"] = b.p;
  j["q"] = b.q;
  j["mode"] = b.mode == ShootingMode::kRelaxedEven ? "relaxed-even" : "anti-periodic";
  j["seed"] = {{"amplitude", b.seed_zeta}, {"energy", b.seed_energy}, {"period", b.seed_period}};
  j["m_user"] = b.m_user;
  j["epsilon1"] = b.epsilon1;
  j["status"] = std::string(to_string(b.status));
  j["message"] = b.message;
  Json folds = Json::array();
  for (const auto& f : b.folds) folds.push_back({{"lambda", f.lambda}, {"zeta", f.zeta}, {"after_point", f.after_point}});
  j["folds"] = folds;
  j["contradicts_trivial_exclusion"] = b.contradicts_trivial_exclusion;
  j["rejected_steps"] = b.rejected_steps;
  j["points"] = b.points.size();
  return j;
}

std::string branch_jsonl(const RunConfig& c, const Branch& b) {
  std::string s = branch_header(c, b).dump() + "\n";
  for (const auto& p : b.points) s += point_json(p).dump() + "\n";
  return s;
}

Json verification_json(const VerificationReport& r) {
  Json j;
  j["lambda"] = r.lambda;
  j["p"] = r.p;
  j["q"] = r.q;
  j["ode_residual"] = r.ode_residual;
  j["velocity_residual"] = r.velocity_residual;
  j["evenness"] = r.symmetry.evenness;
  j["antiperiodicity"] = r.symmetry.antiperiodicity;
  j["midpoint_zero"] = r.symmetry.midpoint_zero;
  j["zero_count"] = r.zero_count ? Json(*r.zero_count) : Json(nullptr);
  j["expected_zero_count"] = r.expected_zero_count;
  if (!r.zero_count_error.empty()) j["zero_count_error"] = r.zero_count_error;
  j["sup_norm"] = r.sup_norm;
  j["tolerances"] = {{"ode", r.tolerances.ode}, {"symmetry", r.tolerances.symmetry}};
  j["ode_ok"] = r.ode_ok;
  j["symmetry_ok"] = r.symmetry_ok;
  j["zeros_ok"] = r.zeros_ok;
  j["passed"] = r.passed;
  j["samples_per_period"] = r.samples_per_period;
  return j;
}

Json spectral_json(const SpectralReport& r, const std::vector<IndexVerdict>& verdicts) {
  Json j;
  j["lambda"] = r.lambda;
  j["q"] = r.q;
  j["p_max"] = r.p_max;
  j["etas"] = r.etas;
  j["mus"] = r.mus;
  j["error_estimates"] = r.error_estimates;
  j["interior_zeros"] = r.interior_zeros;
  j["bounds_lo"] = r.bounds_lo;
  j["bounds_hi"] = r.bounds_hi;
  Json vs = Json::array();
  for (const auto& v : verdicts) {
    Json e;
    e["p"] = v.p;
    e["within_bounds"] = v.within_bounds;
    e["excluded"] = v.excluded;
    e["forced_nondegenerate"] = v.forced_nondegenerate;
    e["mu_not_one"] = v.mu_not_one;
    e["comparison_gap"] = v.comparison_gap;
    e["two_sided_display_holds"] = v.two_sided_display_holds;
    vs.push_back(e);
  }
  j["verdicts"] = vs;
  return j;
}

Json error_json(const Error& e) {
  return {{"status", std::string(to_string(e.code()))}, {"message", e.message()}};
}

// -- shared steps ----------------------------------------------------------------

ShootingMode mode_for(const RunConfig& c, int p) {
  return c.relaxed_symmetry && p % 2 == 0 ? ShootingMode::kRelaxedEven : ShootingMode::kAntiPeriodic;
}

VerificationReport verify_direct(const RunConfig& c, const SatelliteField& field, double zeta, double lambda,
                                 int p, int q, FullProfile* profile_out) {
  ShotOptions s = shot_options(c);
  s.mode = mode_for(c, p);
  return verify_orbit(field, zeta, lambda, p, q, s, verification_tolerances(c), 8192, profile_out);
}

struct SpectrumSet {
  Json json;
  std::map<double, SpectralReport> by_lambda;
  bool ok = true;
};

SpectrumSet spectrum_for(const RunConfig& c, const HomotopyField& field, const FieldBounds& bounds, int q) {
  SpectrumSet out;
  SpectralOptions so;
  so.threads = c.threads;
  Json reports = Json::array();
  for (double lambda : c.lambdas) {
    const auto rep = sturm_eigenvalues(field, lambda, c.p_max, q, so, bounds);
    std::vector<IndexVerdict> verdicts;
    try {
      verdicts = verify_comparison_bounds(rep, bounds);
    } catch (const Error& e) {
      out.ok = false;
      Json j = spectral_json(rep, {});
      j["error"] = error_json(e);
      reports.push_back(j);
      out.by_lambda.emplace(lambda, rep);
      continue;
    }
    reports.push_back(spectral_json(rep, verdicts));
    out.by_lambda.emplace(lambda, rep);
  }
  out.json["q"] = q;
  out.json["reports"] = reports;
  return out;
}

std::shared_ptr<const PrimaryEnsemble> integrated_builtin(const std::string& name, const InitialConditions& ic,
                                                          const SymmetrySpec& spec, const RunConfig& c) {
  NBodyOptions o;
  o.output_intervals = c.intervals;
  const auto run = nbody_integrate(ic.masses, ic.positions, ic.velocities, std::numbers::pi, o);
  IngestOptions io_opts;
  io_opts.tolerance = c.tol.certification;
  return std::make_shared<const PrimaryEnsemble>(ingest_trajectory(run.table, spec, io_opts, name));
}

struct BuiltinIc {
  InitialConditions ic;
  SymmetrySpec spec;
};

BuiltinIc builtin_initial_conditions(const std::string& builtin) {
  const auto parts = split(builtin, ':');
  if (parts.size() == 2 && (parts[0] == "circular" || parts[0] == "nbody")) {
    const int n = parse_int(parts[1], builtin);
    if (n < 2) throw Error(ErrorCode::kInvalidArgument, "polygon needs n >= 2");
    return {polygon_initial_conditions(n), build_circular_polygon(n).symmetry()};
  }
  if (parts.size() == 2 && (parts[0] == "kepler" || parts[0] == "nbody-kepler")) {
    const double e = parse_double(parts[1], builtin);
    return {kepler_initial_conditions(e), build_kepler_pair(e).symmetry()};
  }
  throw Error(ErrorCode::kInvalidArgument, "no initial conditions for builtin '" + builtin + "'");
}

}  // namespace

// -- RunConfig --------------------------------------------------------------------

void RunConfig::validate() const {
  const bool has_builtin = !source.builtin.empty();
  const bool has_file = !source.file.empty() || !source.spec.empty();
  if (command != "nbody" || !source.file.empty()) {
    if (has_builtin == has_file) {
      throw Error(ErrorCode::kInvalidArgument, "give exactly one of --builtin or --file/--spec");
    }
  }
  if (has_file && (source.file.empty() || source.spec.empty())) {
    throw Error(ErrorCode::kInvalidArgument, "--file and --spec go together");
  }
  if (ps.empty() || qs.empty()) throw Error(ErrorCode::kInvalidArgument, "need at least one p and one q");
  for (int p : ps) {
    if (p < 1) throw Error(ErrorCode::kInvalidArgument, "p must be >= 1");
  }
  for (int q : qs) {
    if (q < 1) throw Error(ErrorCode::kInvalidArgument, "q must be >= 1");
  }
  for (double t : {tol.integrator, tol.corrector, tol.certification, tol.ode, tol.symmetry}) {
    if (!(t > 0.0) || !std::isfinite(t)) throw Error(ErrorCode::kInvalidArgument, "tolerances must be positive");
  }
  if (m_user && !(*m_user > 0.0)) throw Error(ErrorCode::kInvalidArgument, "--m-user must be positive");
  if (epsilon1 && !(*epsilon1 > 0.0)) throw Error(ErrorCode::kInvalidArgument, "--epsilon1 must be positive");
  for (double l : lambdas) {
    if (!(l >= 0.0 && l <= 1.0)) throw Error(ErrorCode::kLambdaOutOfRange, "lambda values must lie in [0, 1]");
  }
  if (!(lambda >= 0.0 && lambda <= 1.0)) throw Error(ErrorCode::kLambdaOutOfRange, "--lambda must lie in [0, 1]");
  if (zeta && !std::isfinite(*zeta)) throw Error(ErrorCode::kInvalidArgument, "--zeta must be finite");
  if (rows < 2) throw Error(ErrorCode::kInvalidArgument, "--rows must be >= 2");
  if (intervals < 8) throw Error(ErrorCode::kInvalidArgument, "--intervals must be >= 8");
  if (threads < 1) throw Error(ErrorCode::kInvalidArgument, "--threads must be >= 1");
}

Json RunConfig::to_json() const {
  Json j;
  Json src;
  if (!source.builtin.empty()) src["builtin"] = source.builtin;
  if (!source.file.empty()) {
    src["file"] = source.file.generic_string();
    src["file_digest"] = io::digest(io::read_file(source.file));
  }
  if (!source.spec.empty()) {
    src["spec"] = source.spec.generic_string();
    src["spec_digest"] = io::digest(io::read_file(source.spec));
  }
  j["source"] = src;
  j["p"] = ps;
  j["q"] = qs;
  j["tolerances"] = {{"integrator", tol.integrator},       {"corrector", tol.corrector},
                     {"certification", tol.certification}, {"ode", tol.ode},
                     {"symmetry", tol.symmetry}};
  j["m_user"] = m_user ? Json(*m_user) : Json(nullptr);
  j["epsilon1"] = epsilon1 ? Json(*epsilon1) : Json(nullptr);
  j["relaxed_symmetry"] = relaxed_symmetry;
  j["lambdas"] = lambdas;
  j["p_max"] = p_max;
  j["rows"] = rows;
  j["intervals"] = intervals;
  j["zeta"] = zeta ? Json(*zeta) : Json(nullptr);
  j["lambda"] = lambda;
  return j;
}

std::string RunConfig::hash() const {
  Json j = to_json();
  j["command"] = command;
  return io::digest(j.dump());
}

std::vector<std::pair<int, int>> RunConfig::indices() const {
  std::vector<std::pair<int, int>> out;
  for (int q : qs) {
    for (int p : ps) out.emplace_back(p, q);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

EnsembleSource read_ensemble_file(const fs::path& path) {
  Json j;
  try {
    j = Json::parse(io::read_file(path));
  } catch (const Json::parse_error& e) {
    throw Error(ErrorCode::kParseError, path.string() + ": " + e.what());
  }
  EnsembleSource s;
  const fs::path base = path.parent_path();
  const auto resolve = [&base](const std::string& p) {
    const fs::path f(p);
    return f.is_absolute() || base.empty() ? f : base / f;
  };
  if (j.contains("builtin") && j["builtin"].is_string()) s.builtin = j["builtin"].get<std::string>();
  if (j.contains("file") && j["file"].is_string()) s.file = resolve(j["file"].get<std::string>());
  if (j.contains("spec") && j["spec"].is_string()) s.spec = resolve(j["spec"].get<std::string>());
  if (s.builtin.empty() == s.file.empty()) {
    throw Error(ErrorCode::kParseError, path.string() + ": expected \"builtin\" or \"file\" + \"spec\"");
  }
  return s;
}

std::shared_ptr<const PrimaryEnsemble> load_ensemble(const RunConfig& c) {
  if (!c.source.file.empty()) {
    const auto in = io::read_trajectory(c.source.file, c.source.spec);
    IngestOptions o;
    o.tolerance = c.tol.certification;
    return std::make_shared<const PrimaryEnsemble>(
        ingest_trajectory(in.table, in.spec, o, c.source.file.filename().string()));
  }
  const auto parts = split(c.source.builtin, ':');
  const std::string& name = parts.empty() ? c.source.builtin : parts[0];
  if (name == "circular" && (parts.size() == 2 || parts.size() == 3)) {
    const int n = parse_int(parts[1], c.source.builtin);
    const int d = parts.size() == 3 ? parse_int(parts[2], c.source.builtin) : 0;
    if (n < 2 || d < 0 || (d > 0 && n % d != 0)) {
      throw Error(ErrorCode::kInvalidArgument, "circular:N[:D] needs N >= 2 and D dividing N");
    }
    return std::make_shared<const PrimaryEnsemble>(build_circular_polygon(n, d));
  }
  if (name == "kepler" && parts.size() == 2) {
    return std::make_shared<const PrimaryEnsemble>(build_kepler_pair(parse_double(parts[1], c.source.builtin)));
  }
  if ((name == "nbody" || name == "nbody-kepler") && parts.size() == 2) {
    const auto b = builtin_initial_conditions(c.source.builtin);
    return integrated_builtin(c.source.builtin, b.ic, b.spec, c);
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown builtin '" + c.source.builtin + "' (circular:N[:D], kepler:E, nbody:N, nbody-kepler:E)");
}

// -- commands ----------------------------------------------------------------------

CommandResult cmd_certify(const RunConfig& c) {
  CommandResult r;
  r.report = envelope(c);
  try {
    const auto ens = load_ensemble(c);
    r.report["passed"] = true;
    r.report["ensemble"] = ensemble_json(*ens);
  } catch (const CertificationFailure& e) {
    r.report["passed"] = false;
    r.report["certificate"] = io::to_json(e.certificate());
    r.report["error"] = error_json(e);
    r.exit_code = kExitNumerical;
  }
  const fs::path out = c.out_dir / "certificate.json";
  io::write_file(out, dump(r.report));
  r.files.push_back(out);
  return r;
}

CommandResult cmd_bounds(const RunConfig& c) {
  CommandResult r;
  const auto ens = load_ensemble(c);
  const auto b = field_bounds(*ens);
  r.report = envelope(c);
  r.report["ensemble"] = ensemble_json(*ens);
  r.report["bounds"] = bounds_json(b);
  Json idx = Json::array();
  for (const auto& [p, q] : c.indices()) {
    const double s = static_cast<double>(p) * p / (static_cast<double>(q) * q);
    idx.push_back({{"p", p},
                   {"q", q},
                   {"ratio_squared", s},
                   {"excluded", b.excludes(p, q)},
                   {"forced_nondegenerate", s < b.m - 1.0 || s > b.M - 1.0}});
  }
  r.report["indices"] = idx;
  Json windows = Json::array();
  for (int q : c.qs) windows.push_back({{"q", q}, {"default_p_max", default_p_max(b, q)}});
  r.report["spectral_windows"] = windows;
  const fs::path out = c.out_dir / "bounds.json";
  io::write_file(out, dump(r.report));
  r.files.push_back(out);
  return r;
}

CommandResult cmd_period_table(const RunConfig& c) {
  CommandResult r;
  const auto ens = load_ensemble(c);
  const auto sys = ConservativeSystem::from_ensemble(*ens);
  const double e_min = sys.min_energy();
  // Geometric grid in the excess energy, from 1e-8 |E_min| to 0.999 |E_min|.
  const double lo = 1e-8, hi = 0.999;
  std::string csv = io::csv_preamble(c.hash()) + "E,zeta,T\n";
  bool increasing = true;
  double prev = -1.0;
  for (std::size_t k = 0; k < c.rows; ++k) {
    const double frac = lo * std::pow(hi / lo, static_cast<double>(k) / static_cast<double>(c.rows - 1));
    const double energy = e_min + frac * std::abs(e_min);
    const EnergyLevel l = sys.level(energy);
    if (!(l.period > prev)) increasing = false;
    prev = l.period;
    csv += io::format_double(l.energy) + ',' + io::format_double(l.amplitude) + ',' + io::format_double(l.period) +
           '\n';
  }
  r.report = envelope(c);
  r.report["min_energy"] = e_min;
  r.report["beta"] = sys.beta();
  r.report["small_oscillation_period"] = sys.small_oscillation_period();
  r.report["rows"] = c.rows;
  r.report["strictly_increasing"] = increasing;
  if (!increasing) r.exit_code = kExitNumerical;
  const fs::path table = c.out_dir / "period_table.csv";
  const fs::path summary = c.out_dir / "period_table.json";
  io::write_file(table, csv);
  io::write_file(summary, dump(r.report));
  r.files = {table, summary};
  return r;
}

CommandResult cmd_seed(const RunConfig& c) {
  CommandResult r;
  const auto ens = load_ensemble(c);
  const auto sys = ConservativeSystem::from_ensemble(*ens);
  const auto idx = c.indices();
  std::vector<Json> rows(idx.size());
  std::vector<int> codes(idx.size(), kExitOk);
  parallel_for(idx.size(), c.threads, [&](std::size_t i) {
    const auto [p, q] = idx[i];
    Json j = envelope(c);
    j["p"] = p;
    j["q"] = q;
    try {
      const auto seed = solve_seed(sys, p, q, seed_options(c));
      j["status"] = "ok";
      j["seed"] = seed_json(seed);
      io::write_file(c.out_dir / (index_stem("seed", p, q) + ".csv"), io::profile_csv(seed.profile, c.hash()));
    } catch (const Error& e) {
      j.update(error_json(e));
      codes[i] = exit_code_for(e.code());
    }
    io::write_file(c.out_dir / (index_stem("seed", p, q) + ".json"), dump(j));
    rows[i] = std::move(j);
  });
  r.report = envelope(c);
  r.report["seeds"] = rows;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    r.exit_code = std::max(r.exit_code, codes[i]);
    r.files.push_back(c.out_dir / (index_stem("seed", idx[i].first, idx[i].second) + ".json"));
  }
  return r;
}

namespace {

struct BranchJob {
  int p = 0;
  int q = 0;
  std::optional<SeedSolution> seed;
  std::optional<Branch> branch;
  std::optional<Error> error;
};

BranchJob run_branch(const RunConfig& c, const HomotopyField& field, const ConservativeSystem& sys, int p, int q) {
  BranchJob job;
  job.p = p;
  job.q = q;
  try {
    job.seed = solve_seed(sys, p, q, seed_options(c));
    job.branch = continue_branch(field, *job.seed, continuation_config(c));
  } catch (const Error& e) {
    job.error = e;
  }
  return job;
}

std::string failed_branch_jsonl(const RunConfig& c, const BranchJob& job) {
  Json j;
  j["record"] = "header";
  j["version"] = std::string(io::library_version());
  j["config_hash"] = c.hash();
  j["p"] = job.p;
  j["q"] = job.q;
  j["status"] = std::string(to_string(job.error->code()));
  j["message"] = job.error->message();
  j["points"] = 0;
  return j.dump() + "\n";
}

void write_branch(const RunConfig& c, const BranchJob& job, const fs::path& dir) {
  const fs::path file = dir / (index_stem("branch", job.p, job.q) + ".jsonl");
  if (job.error) {
    io::write_file(file, failed_branch_jsonl(c, job));
    return;
  }
  io::write_file(file, branch_jsonl(c, *job.branch));
  if (job.branch->final_profile.size() > 0) {
    io::write_file(dir / (index_stem("profile", job.p, job.q) + ".csv"),
                   io::profile_csv(job.branch->final_profile, c.hash()));
  }
}

int branch_exit_code(const BranchJob& job) {
  if (job.error) return exit_code_for(job.error->code());
  return job.branch->status == BranchStatus::kReachedLambdaOne ? kExitOk : kExitNumerical;
}

Json branch_summary(const BranchJob& job) {
  Json j;
  j["p"] = job.p;
  j["q"] = job.q;
  if (job.error) {
    j.update(error_json(*job.error));
    return j;
  }
  const Branch& b = *job.branch;
  j["status"] = std::string(to_string(b.status));
  j["message"] = b.message;
  j["seed_amplitude"] = b.seed_zeta;
  j["final_lambda"] = b.points.back().lambda;
  j["final_amplitude"] = b.points.back().zeta;
  j["points"] = b.points.size();
  j["folds"] = b.folds.size();
  j["contradicts_trivial_exclusion"] = b.contradicts_trivial_exclusion;
  return j;
}

}  // namespace

CommandResult cmd_continue(const RunConfig& c) {
  CommandResult r;
  const auto ens = load_ensemble(c);
  const HomotopyField field(ens);
  const auto sys = ConservativeSystem::from_ensemble(*ens);
  const auto idx = c.indices();
  std::vector<BranchJob> jobs(idx.size());
  parallel_for(idx.size(), c.threads, [&](std::size_t i) {
    jobs[i] = run_branch(c, field, sys, idx[i].first, idx[i].second);
    write_branch(c, jobs[i], c.out_dir);
  });
  r.report = envelope(c);
  Json rows = Json::array();
  for (const auto& job : jobs) {
    rows.push_back(branch_summary(job));
    r.exit_code = std::max(r.exit_code, branch_exit_code(job));
    r.files.push_back(c.out_dir / (index_stem("branch", job.p, job.q) + ".jsonl"));
  }
  r.report["branches"] = rows;
  return r;
}

CommandResult cmd_spectrum(const RunConfig& c) {
  CommandResult r;
  const auto ens = load_ensemble(c);
  const HomotopyField field(ens);
  const auto b = field_bounds(*ens);
  r.report = envelope(c);
  r.report["bounds"] = bounds_json(b);
  Json per_q = Json::array();
  for (int q : c.qs) {
    auto set = spectrum_for(c, field, b, q);
    if (!set.ok) r.exit_code = kExitNumerical;
    Json j = envelope(c);
    j["bounds"] = bounds_json(b);
    j.update(set.json);
    const fs::path out = c.out_dir / ("spectrum_q" + std::to_string(q) + ".json");
    io::write_file(out, dump(j));
    r.files.push_back(out);
    per_q.push_back(set.json);
  }
  r.report["spectra"] = per_q;
  return r;
}

CommandResult cmd_verify(const RunConfig& c) {
  CommandResult r;
  const auto ens = load_ensemble(c);
  const HomotopyField field(ens);
  const auto sys = ConservativeSystem::from_ensemble(*ens);
  const auto idx = c.indices();
  std::vector<Json> rows(idx.size());
  std::vector<int> codes(idx.size(), kExitOk);
  parallel_for(idx.size(), c.threads, [&](std::size_t i) {
    const auto [p, q] = idx[i];
    Json j = envelope(c);
    j["p"] = p;
    j["q"] = q;
    try {
      double zeta = 0.0;
      double lambda = c.lambda;
      if (c.zeta) {
        zeta = *c.zeta;
        j["source"] = "given";
      } else {
        BranchJob job = run_branch(c, field, sys, p, q);
        if (job.error) throw *job.error;
        const Branch& b = *job.branch;
        j["branch"] = branch_summary(job);
        if (b.status != BranchStatus::kReachedLambdaOne) {
          j["status"] = std::string(to_string(b.status));
          j["message"] = b.message;
          codes[i] = kExitNumerical;
          io::write_file(c.out_dir / (index_stem("verify", p, q) + ".json"), dump(j));
          rows[i] = std::move(j);
          return;
        }
        zeta = b.points.back().zeta;
        lambda = 1.0;
        j["source"] = "continuation";
      }
      FullProfile profile;
      const auto rep = verify_direct(c, field, zeta, lambda, p, q, &profile);
      j["amplitude"] = zeta;
      j["status"] = rep.passed ? "passed" : "failed";
      j["verification"] = verification_json(rep);
      if (!rep.passed) codes[i] = kExitNumerical;
      io::write_file(c.out_dir / (index_stem("profile", p, q) + ".csv"), io::profile_csv(profile, c.hash()));
    } catch (const Error& e) {
      j.update(error_json(e));
      codes[i] = exit_code_for(e.code());
    }
    io::write_file(c.out_dir / (index_stem("verify", p, q) + ".json"), dump(j));
    rows[i] = std::move(j);
  });
  r.report = envelope(c);
  r.report["verifications"] = rows;
  for (std::size_t i = 0; i < idx.size(); ++i) {
    r.exit_code = std::max(r.exit_code, codes[i]);
    r.files.push_back(c.out_dir / (index_stem("verify", idx[i].first, idx[i].second) + ".json"));
  }
  return r;
}

CommandResult cmd_nbody(const RunConfig& c) {
  CommandResult r;
  const std::string name = c.source.builtin.empty() ? "circular:2" : c.source.builtin;
  const auto b = builtin_initial_conditions(name);
  NBodyOptions o;
  o.output_intervals = c.intervals;
  const auto run = nbody_integrate(b.ic.masses, b.ic.positions, b.ic.velocities, std::numbers::pi, o);
  r.report = envelope(c);
  r.report["initial_conditions"] = name;
  r.report["closure_residual"] = run.closure_residual;
  r.report["energy_drift"] = run.energy_drift;
  r.report["momentum_drift"] = run.momentum_drift;
  r.report["center_of_mass_drift"] = run.center_of_mass_drift;
  r.report["steps"] = run.steps;
  r.report["rejected_steps"] = run.rejected_steps;
  try {
    IngestOptions io_opts;
    io_opts.tolerance = c.tol.certification;
    const auto ens = ingest_trajectory(run.table, b.spec, io_opts, name);
    r.report["certificate"] = io::to_json(ens.certificate());
    r.report["constants"] = io::to_json(ens.constants());
  } catch (const CertificationFailure& e) {
    r.report["certificate"] = io::to_json(e.certificate());
    r.report["error"] = error_json(e);
    r.exit_code = kExitNumerical;
  } catch (const Error& e) {
    r.report["error"] = error_json(e);
    r.exit_code = kExitNumerical;
  }
  Json sidecar = io::sidecar_json(run.table, b.spec);
  sidecar["version"] = std::string(io::library_version());
  sidecar["config_hash"] = c.hash();
  const fs::path csv = c.out_dir / "trajectory.csv";
  const fs::path side = c.out_dir / "trajectory.json";
  const fs::path rep = c.out_dir / "nbody_report.json";
  io::write_file(csv, io::csv_preamble(c.hash()) + io::trajectory_csv(run.table));
  io::write_file(side, dump(sidecar));
  io::write_file(rep, dump(r.report));
  r.files = {csv, side, rep};
  return r;
}

CommandResult cmd_pipeline(const RunConfig& c) {
  CommandResult r;
  const auto ens = load_ensemble(c);
  const HomotopyField field(ens);
  const auto sys = ConservativeSystem::from_ensemble(*ens);
  const auto bounds = field_bounds(*ens);
  const auto idx = c.indices();

  RunConfig spectral_cfg = c;
  spectral_cfg.lambdas = {0.0, 0.5, 1.0};
  std::map<int, SpectrumSet> spectra;
  for (int q : c.qs) {
    if (spectra.count(q)) continue;
    spectra.emplace(q, spectrum_for(spectral_cfg, field, bounds, q));
    Json j = envelope(c);
    j["bounds"] = bounds_json(bounds);
    j.update(spectra.at(q).json);
    io::write_file(c.out_dir / ("spectrum_q" + std::to_string(q) + ".json"), dump(j));
  }

  std::vector<BranchJob> jobs(idx.size());
  std::vector<Json> rows(idx.size());
  std::vector<int> codes(idx.size(), kExitOk);
  parallel_for(idx.size(), c.threads, [&](std::size_t i) {
    const auto [p, q] = idx[i];
    const fs::path dir = c.out_dir / index_stem("job", p, q);
    jobs[i] = run_branch(c, field, sys, p, q);
    const BranchJob& job = jobs[i];
    write_branch(c, job, dir);
    Json row = branch_summary(job);
    codes[i] = branch_exit_code(job);
    if (job.seed) {
      Json sj = envelope(c);
      sj["seed"] = seed_json(*job.seed);
      io::write_file(dir / (index_stem("seed", p, q) + ".json"), dump(sj));
    }
    if (job.branch && job.branch->status == BranchStatus::kReachedLambdaOne) {
      try {
        FullProfile profile;
        const auto rep = verify_direct(c, field, job.branch->points.back().zeta, 1.0, p, q, &profile);
        Json v = envelope(c);
        v["amplitude"] = job.branch->points.back().zeta;
        v["verification"] = verification_json(rep);
        io::write_file(dir / (index_stem("verify", p, q) + ".json"), dump(v));
        io::write_file(dir / (index_stem("verified_profile", p, q) + ".csv"), io::profile_csv(profile, c.hash()));
        row["verified"] = rep.passed;
        row["ode_residual"] = rep.ode_residual;
        row["symmetry_residual"] = std::max({rep.symmetry.evenness, rep.symmetry.antiperiodicity,
                                             rep.symmetry.midpoint_zero});
        if (!rep.passed) codes[i] = kExitNumerical;
      } catch (const Error& e) {
        row["verified"] = false;
        row["verification_error"] = error_json(e);
        codes[i] = std::max(codes[i], exit_code_for(e.code()));
      }
    }
    Json mu = Json::array();
    for (const auto& [lambda, rep] : spectra.at(q).by_lambda) {
      if (static_cast<std::size_t>(p) < rep.verdicts.size()) {
        mu.push_back({{"lambda", lambda}, {"mu", rep.mus[p]}, {"mu_not_one", static_cast<bool>(rep.verdicts[p])}});
      }
    }
    row["spectral"] = mu;
    row["excluded"] = bounds.excludes(p, q);
    rows[i] = std::move(row);
  });

  // Branches sharing q that reached lambda = 1 must stay apart.
  Json distinct = Json::array();
  for (int q : c.qs) {
    std::vector<Branch> same_q;
    for (const auto& job : jobs) {
      if (job.q == q && job.branch && job.branch->status == BranchStatus::kReachedLambdaOne) {
        same_q.push_back(*job.branch);
      }
    }
    if (same_q.size() < 2) continue;
    Json d;
    d["q"] = q;
    try {
      const auto rep = distinctness_check(field, same_q, continuation_config(c));
      Json pairs = Json::array();
      for (const auto& pr : rep.pairs) {
        pairs.push_back({{"p1", pr.p1},
                         {"p2", pr.p2},
                         {"min_separation", io::number(pr.min_separation)},
                         {"lambda_at_min", pr.lambda_at_min},
                         {"duplicate_input", pr.duplicate_input},
                         {"distinct", pr.distinct}});
      }
      d["pairs"] = pairs;
      d["all_distinct"] = rep.all_distinct;
      if (!rep.all_distinct) r.exit_code = kExitNumerical;
    } catch (const Error& e) {
      d["error"] = error_json(e);
      r.exit_code = kExitNumerical;
    }
    distinct.push_back(d);
  }

  r.report = envelope(c);
  r.report["ensemble"] = ensemble_json(*ens);
  r.report["bounds"] = bounds_json(bounds);
  r.report["jobs"] = rows;
  r.report["distinctness"] = distinct;
  for (int code : codes) r.exit_code = std::max(r.exit_code, code);
  for (const auto& [q, set] : spectra) {
    if (!set.ok) r.exit_code = std::max(r.exit_code, kExitNumerical);
  }

  std::string table = io::csv_preamble(c.hash()) + "p,q,status,final_lambda,final_amplitude,verified\n";
  for (const auto& row : rows) {
    table += std::to_string(row["p"].get<int>()) + ',' + std::to_string(row["q"].get<int>()) + ',' +
             row["status"].get<std::string>() + ',';
    table += row.contains("final_lambda") ? io::format_double(row["final_lambda"].get<double>()) : "";
    table += ',';
    table += row.contains("final_amplitude") ? io::format_double(row["final_amplitude"].get<double>()) : "";
    table += ',';
    table += row.contains("verified") ? (row["verified"].get<bool>() ? "true" : "false") : "";
    table += '\n';
  }
  const fs::path summary = c.out_dir / "summary.json";
  const fs::path csv = c.out_dir / "summary.csv";
  io::write_file(summary, dump(r.report));
  io::write_file(csv, table);
  r.files = {summary, csv};
  return r;
}

int run(const RunConfig& c) {
  try {
    c.validate();
    CommandResult r;
    if (c.command == "certify") r = cmd_certify(c);
    else if (c.command == "bounds") r = cmd_bounds(c);
    else if (c.command == "period-table") r = cmd_period_table(c);
    else if (c.command == "seed") r = cmd_seed(c);
    else if (c.command == "continue") r = cmd_continue(c);
    else if (c.command == "spectrum") r = cmd_spectrum(c);
    else if (c.command == "verify") r = cmd_verify(c);
    else if (c.command == "nbody") r = cmd_nbody(c);
    else if (c.command == "pipeline") r = cmd_pipeline(c);
    else throw Error(ErrorCode::kInvalidArgument, "unknown command '" + c.command + "'");
    for (const auto& f : r.files) std::cout << f.generic_string() << '\n';
    return r.exit_code;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
}

}  // namespace sitnikov::app
