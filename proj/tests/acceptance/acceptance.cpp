// Acceptance run: one PASS/FAIL line per criterion, exit status 0 iff all
// pass. Every reference value is computed here independently of the code
// under test (closed forms, finite differences, direct integration).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sitnikov/conservative.hpp"
#include "sitnikov/continuation.hpp"
#include "sitnikov/error.hpp"
#include "sitnikov/field.hpp"
#include "sitnikov/primaries.hpp"
#include "sitnikov/shooting.hpp"
#include "sitnikov/spectral.hpp"

using namespace sitnikov;
using std::numbers::pi;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

std::shared_ptr<const PrimaryEnsemble> share(PrimaryEnsemble e) {
  return std::make_shared<const PrimaryEnsemble>(std::move(e));
}

// Branches accepted by criteria 1 and 5, re-examined by criterion 6.
std::vector<Branch> g_branches;

// -- 1 ---------------------------------------------------------------------
void circular_identity(Outcome& o) {
  const auto ens = share(build_circular_polygon(2));
  // Two masses 1/2 at +-a with a^3 = 1/32: beta = 2 (1/2) / a^3.
  const double a = std::pow(2.0, -5.0 / 3.0);
  const double beta_oracle = 1.0 / (a * a * a);
  o.require(std::abs(ens->constants().beta - beta_oracle) <= 1e-10 * beta_oracle, "beta = 32");
  const HomotopyField field(ens);
  const auto sys = ConservativeSystem::from_ensemble(*ens);
  double worst = 0.0;
  for (int p : {1, 3, 5}) {
    const auto seed = solve_seed(sys, p, 1);
    const Branch b = continue_branch(field, seed);
    o.require(b.status == BranchStatus::kReachedLambdaOne, "p=" + std::to_string(p) + " reaches 1");
    o.require(!b.points.empty() && b.points.back().lambda == 1.0, "lands on lambda = 1");
    for (const auto& pt : b.points) {
      worst = std::max(worst, std::abs(pt.zeta - seed.level.amplitude));
      o.require(pt.zero_count == 2 * p, "zero count " + std::to_string(2 * p));
    }
    g_branches.push_back(b);
  }
  o.require(worst <= 1e-10, "max |zeta - zeta0| <= 1e-10");
  o.detail << "beta=" << ens->constants().beta << " max|dzeta|=" << worst;
}

// -- 2 ---------------------------------------------------------------------
void period_limit(Outcome& o) {
  const auto sys = ConservativeSystem::from_ensemble(build_circular_polygon(2));
  const double e = sys.min_energy() + 1e-8 * std::abs(sys.min_energy());
  const double t = sys.period_function(e);
  const double oracle = 2.0 * pi / std::sqrt(32.0);
  const double rel = std::abs(t - oracle) / oracle;
  o.require(rel <= 1e-4, "relative error <= 1e-4");
  o.detail << "T=" << t << " 2pi/sqrt(32)=" << oracle << " rel=" << rel;
}

// -- 3 ---------------------------------------------------------------------
void period_monotone(Outcome& o) {
  const auto sys = ConservativeSystem::from_ensemble(build_circular_polygon(2));
  const double e_min = sys.min_energy();
  double prev = 0.0;
  int violations = 0;
  for (int k = 0; k < 50; ++k) {
    const double frac = 1e-8 * std::pow(0.999 / 1e-8, k / 49.0);
    const double t = sys.period_function(e_min + frac * std::abs(e_min));
    if (k > 0 && !(t > prev)) ++violations;
    prev = t;
  }
  o.require(violations == 0, "strictly increasing on the grid");
  std::mt19937_64 rng(20260316);
  std::uniform_real_distribution<double> u(0.01, 0.95);
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const double e = e_min * (1.0 - u(rng));
    const double quad = sys.period_function(e);
    const double ivp = sys.period_by_integration(e);
    worst = std::max(worst, std::abs(quad - ivp));
  }
  o.require(worst <= 1e-7, "quadrature vs IVP <= 1e-7");
  o.detail << "violations=" << violations << " max|T_quad-T_ivp|=" << worst;
}

// -- 4 ---------------------------------------------------------------------
void seed_gate(Outcome& o) {
  const auto sys = ConservativeSystem::from_ensemble(build_circular_polygon(2));
  const double root_beta = std::sqrt(32.0);
  SeedOptions relaxed;
  relaxed.relaxed_symmetry = true;
  int checked = 0;
  for (int q : {1, 2}) {
    for (int p = 1; p <= 6 * q; ++p) {
      bool no_seed = false;
      try {
        solve_seed(sys, p, q, relaxed);
      } catch (const Error& e) {
        no_seed = e.code() == ErrorCode::kNoSeed;
        if (!no_seed) o.require(false, std::string("unexpected ") + e.what());
      }
      o.require(no_seed == (p > root_beta * q), "p=" + std::to_string(p) + " q=" + std::to_string(q));
      ++checked;
    }
  }
  // The boundary pair named in the criterion, without relaxed symmetry.
  bool five_ok = true;
  try {
    solve_seed(sys, 5, 1);
  } catch (const Error&) {
    five_ok = false;
  }
  bool six_no_seed = false;
  try {
    solve_seed(sys, 6, 1);
  } catch (const Error& e) {
    six_no_seed = e.code() == ErrorCode::kNoSeed;
  }
  o.require(five_ok && six_no_seed, "p=5 seeds, p=6 NoSeed");
  o.detail << "sqrt(beta)=" << root_beta << " indices checked=" << checked;
}

// -- 5 ---------------------------------------------------------------------
void end_to_end(Outcome& o) {
  for (double e : {0.1, 0.2}) {
    const auto ens = share(build_kepler_pair(e));
    const HomotopyField field(ens);
    const auto sys = ConservativeSystem::from_ensemble(*ens);
    for (int p : {1, 3}) {
      const std::string tag = "e=" + std::to_string(e).substr(0, 3) + " p=" + std::to_string(p);
      const auto seed = solve_seed(sys, p, 1);
      const Branch b = continue_branch(field, seed);
      o.require(b.status == BranchStatus::kReachedLambdaOne, tag + " reaches 1");
      if (b.status != BranchStatus::kReachedLambdaOne) continue;
      g_branches.push_back(b);
      const auto r = verify_orbit(field, b.points.back().zeta, 1.0, p, 1);
      const double sym = std::max({r.symmetry.evenness, r.symmetry.antiperiodicity, r.symmetry.midpoint_zero});
      o.require(r.ode_residual <= 1e-6, tag + " ODE residual");
      o.require(sym <= 1e-8, tag + " symmetry");
      o.require(r.zero_count && *r.zero_count == 2 * p, tag + " zero count");
      o.detail << tag << ": ode=" << r.ode_residual << " sym=" << sym << "; ";
    }
  }
}

// -- 6 ---------------------------------------------------------------------
void zero_invariance(Outcome& o) {
  std::size_t points = 0;
  double worst_gap = 0.0;
  for (const auto& b : g_branches) {
    for (const auto& pt : b.points) {
      ++points;
      o.require(pt.zero_count == 2 * b.p, "count = 2p");
      o.require(pt.sign_changes == 2 * b.p, "sign changes = 2p");
      worst_gap = std::max(worst_gap, std::abs(pt.winding_integral - pt.sign_changes));
    }
  }
  o.require(!g_branches.empty(), "branches available");
  o.require(worst_gap < 0.5, "winding integral rounds to the sign-change count");
  o.detail << "branches=" << g_branches.size() << " points=" << points
           << " max|winding-sign_changes|=" << worst_gap;
}

// -- 7 ---------------------------------------------------------------------
void sturm_liouville(Outcome& o) {
  double worst = 0.0;
  for (double a : {1.0, 33.0}) {
    const auto rep = sturm_eigenvalues([a](double) { return a; }, 0.0, 6, 1);
    for (int p = 0; p <= 6; ++p) {
      const double exact = (1.0 + p * p) / a;
      worst = std::max(worst, std::abs(rep.etas[p] - exact) / exact);
    }
  }
  o.require(worst <= 1e-9, "constant weight to 1e-9");

  // F2 - F1 = 1 + 0.5 cos 4t > 0.
  const Weight f1 = [](double t) { return 2.0 + std::cos(2.0 * t); };
  const Weight f2 = [](double t) { return 3.0 + std::cos(2.0 * t) + 0.5 * std::cos(4.0 * t); };
  const auto r1 = sturm_eigenvalues(f1, 0.0, 6, 1);
  const auto r2 = sturm_eigenvalues(f2, 0.0, 6, 1);
  bool monotone = true;
  for (int p = 0; p <= 6; ++p) monotone = monotone && r1.etas[p] > r2.etas[p];
  o.require(monotone, "comparison monotonicity");

  const auto ens = share(build_kepler_pair(0.5));
  const HomotopyField field(ens);
  const auto bounds = field_bounds(*ens);
  // At lambda = 0 the weight is the constant m and eta_p = (1 + p^2)/m sits
  // on the upper bound, so membership is judged at the solver's stated
  // relative accuracy of 1e-9.
  int inside = 0, total = 0;
  double excursion = 0.0;
  for (double lambda : {0.0, 0.5, 1.0}) {
    const auto rep = sturm_eigenvalues(field, lambda, 6, 1, {}, bounds);
    for (int p = 0; p <= 6; ++p) {
      const double s = 1.0 + p * p;
      const double eta = rep.etas[p];
      ++total;
      const double out = std::max({0.0, s / bounds.M - eta, eta - s / bounds.m}) / eta;
      excursion = std::max(excursion, out);
      if (out <= 1e-9) ++inside;
    }
    try {
      verify_comparison_bounds(rep, bounds);
    } catch (const Error& e) {
      o.require(false, e.what());
    }
  }
  o.require(inside == total, "Kepler e=0.5 sandwich");
  o.detail << "const-weight rel err=" << worst << " sandwich " << inside << "/" << total
           << " max rel excursion=" << excursion << " (m=" << bounds.m
           << ", M=" << bounds.M << ")";
}

// -- 8 ---------------------------------------------------------------------
void gradients(Outcome& o) {
  const auto ens = share(build_kepler_pair(0.2));
  const HomotopyField field(ens);
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> uz(0.1, 1.5), ul(0.0, 1.0), ut(0.0, pi), uzz(-2.0, 2.0);
  double worst_r = 0.0;
  for (int i = 0; i < 20; ++i) {
    const double zeta = uz(rng), lambda = ul(rng), h = 1e-5;
    const double d = shoot(field, zeta, lambda, 1).derivative_wrt_amplitude;
    const double fd = (shoot(field, zeta + h, lambda, 1).residual - shoot(field, zeta - h, lambda, 1).residual) / (2 * h);
    worst_r = std::max(worst_r, std::abs(d - fd));
  }
  o.require(worst_r <= 1e-6, "dR/dzeta vs centered differences");

  // Five-point stencils on U: O(h^4) truncation.
  double worst_u1 = 0.0, worst_u2 = 0.0;
  for (int i = 0; i < 100; ++i) {
    const double t = ut(rng), z = uzz(rng), lambda = ul(rng), h = 1e-3;
    const auto u = [&](double x) { return field.potential(t, x, lambda).value; };
    const auto s = field.potential(t, z, lambda);
    const double d1 = (-u(z + 2 * h) + 8 * u(z + h) - 8 * u(z - h) + u(z - 2 * h)) / (12 * h);
    const double d2 = (-u(z + 2 * h) + 16 * u(z + h) - 30 * u(z) + 16 * u(z - h) - u(z - 2 * h)) / (12 * h * h);
    worst_u1 = std::max(worst_u1, std::abs(s.dz - d1));
    worst_u2 = std::max(worst_u2, std::abs(s.dzz - d2));
    const auto f = field.evaluate(t, z, lambda);
    const bool consistent = std::abs(f.acceleration + s.dz) <= 1e-12 * std::max(1.0, std::abs(s.dz)) &&
                            std::abs(f.stiffness + s.dzz) <= 1e-12 * std::max(1.0, std::abs(s.dzz));
    if (!consistent) o.require(false, "field = -grad U");
  }
  o.require(worst_u1 <= 1e-7 && worst_u2 <= 1e-7, "dU, d2U vs finite differences");
  o.detail << "max|dR/dzeta err|=" << worst_r << " max|dU err|=" << worst_u1 << " max|d2U err|=" << worst_u2;
}

// -- 9 ---------------------------------------------------------------------
double worst_residual(const SymmetryCertificate& c) {
  return std::max({c.max_rotation_residual, c.max_reversal_residual, c.max_mass_residual});
}

void certification(Outcome& o) {
  double worst_exact = 0.0;
  for (int n = 2; n <= 6; ++n) {
    const auto ens = build_circular_polygon(n);
    const auto c = certify_symmetry(ens.orbits(), ens.symmetry(), 1e-10);
    o.require(c.passed, "polygon n=" + std::to_string(n));
    worst_exact = std::max(worst_exact, worst_residual(c));
  }
  for (double e : {0.1, 0.5, 0.9}) {
    const auto ens = build_kepler_pair(e);
    const auto c = certify_symmetry(ens.orbits(), ens.symmetry(), 1e-10);
    o.require(c.passed, "Kepler e=" + std::to_string(e));
    worst_exact = std::max(worst_exact, worst_residual(c));
  }

  const auto base = build_circular_polygon(4, 2);
  // 1% mass perturbation of one body.
  {
    std::vector<MassedOrbit> orbits = base.orbits();
    orbits[0] = MassedOrbit(orbits[0].mass() * 1.01, orbits[0].motion());
    const auto c = certify_symmetry(orbits, base.symmetry(), 1e-10);
    const double r = c.max_mass_residual;
    o.require(!c.passed && r >= 0.005 && r <= 0.02, "1% mass perturbation detected within 2x");
    o.detail << "mass residual=" << r << " ";
  }
  // 1e-3 radial displacement of one body.
  {
    std::vector<MassedOrbit> orbits = base.orbits();
    auto motion = std::get<CircularMotion>(orbits[0].motion());
    motion.radius += 1e-3;
    orbits[0] = MassedOrbit(orbits[0].mass(), motion);
    const auto c = certify_symmetry(orbits, base.symmetry(), 1e-10);
    const double r = std::max(c.max_rotation_residual, c.max_reversal_residual);
    o.require(!c.passed && r >= 5e-4 && r <= 2e-3, "1e-3 position perturbation detected within 2x");
    o.detail << "position residual=" << r << " ";
  }
  // Same displacement through the table path.
  {
    TrajectoryTable table = sample_ensemble(base, 256);
    for (auto& row : table.positions) row[0].x += 1e-3;
    IngestOptions opts;
    opts.tolerance = 1e-10;
    opts.tol_com = 1.0;  // the shift also moves the centre of mass; certification is what is probed
    double r = 0.0;
    bool failed = false;
    try {
      ingest_trajectory(table, base.symmetry(), opts);
    } catch (const CertificationFailure& e) {
      failed = true;
      r = std::max(e.certificate().max_rotation_residual, e.certificate().max_reversal_residual);
    }
    o.require(failed && r >= 5e-4 && r <= 2e-3, "table perturbation detected within 2x");
    o.detail << "table residual=" << r << " ";
  }
  o.require(worst_exact <= 1e-10, "exact configurations at 1e-10");
  o.detail << "exact max residual=" << worst_exact;
}

// -- 10 --------------------------------------------------------------------
void energy_conservation(Outcome& o) {
  double worst = 0.0;
  int runs = 0;
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> u(0.05, 0.9);
  for (double e : {0.0, 0.2, 0.5}) {
    const auto sys = ConservativeSystem::from_ensemble(build_kepler_pair(e));
    for (int q = 1; q <= 5; ++q) {
      for (int p = 1; p <= 2 * q + 1; p += 2) {
        try {
          const auto seed = solve_seed(sys, p, q);
          worst = std::max(worst, seed.energy_drift);
          ++runs;
        } catch (const Error& err) {
          if (err.code() != ErrorCode::kNoSeed) o.require(false, err.what());
        }
      }
      // Arbitrary initial amplitudes, not only seeds.
      for (int i = 0; i < 3; ++i) {
        const double zeta = sys.amplitude_of_energy(sys.min_energy() * (1.0 - u(rng)));
        const auto prof = integrate_full(sys, zeta, 0.0, q);
        const double e0 = sys.potential(zeta);
        for (std::size_t k = 0; k < prof.size(); ++k) {
          const double en = 0.5 * prof.zdot[k] * prof.zdot[k] + sys.potential(prof.z[k]);
          worst = std::max(worst, std::abs(en - e0));
        }
        ++runs;
      }
    }
  }
  o.require(worst <= 1e-9, "|E(t) - E(0)| <= 1e-9");
  o.detail << "integrations=" << runs << " max drift=" << worst;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria = {
      {"circular identity homotopy", circular_identity},
      {"period-function small-oscillation limit", period_limit},
      {"period-function monotonicity and IVP agreement", period_monotone},
      {"seed existence gate p > sqrt(beta) q", seed_gate},
      {"end-to-end existence at lambda = 1 (Kepler e = 0.1, 0.2)", end_to_end},
      {"zero-count invariance along branches", zero_invariance},
      {"Sturm-Liouville eigenvalues and comparison bounds", sturm_liouville},
      {"variational and potential derivatives", gradients},
      {"symmetry certification discrimination", certification},
      {"energy conservation at lambda = 0", energy_conservation},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      criteria[i].run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (!o.pass) ++failures;
    std::printf("%s %2zu %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name, secs,
                o.detail.str().c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
