#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>

#include "sitnikov/continuation.hpp"
#include "sitnikov/error.hpp"
#include "synthetic_fields.hpp"

using namespace sitnikov;
using std::numbers::pi;

namespace {

std::shared_ptr<const PrimaryEnsemble> share(PrimaryEnsemble e) {
  return std::make_shared<const PrimaryEnsemble>(std::move(e));
}

// Bisection for a sign change of the residual in zeta on [lo, hi].
double root_between(const SatelliteField& f, double lambda, double lo, double hi) {
  double rlo = shoot(f, lo, lambda, 1).residual;
  for (int i = 0; i < 60; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double rm = shoot(f, mid, lambda, 1).residual;
    if ((rm > 0) == (rlo > 0)) {
      lo = mid;
      rlo = rm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

int sign_changes_on_grid(const SatelliteField& f, double lambda, double lo, double hi, int n) {
  int changes = 0;
  double prev = shoot(f, lo, lambda, 1).residual;
  for (int i = 1; i <= n; ++i) {
    const double r = shoot(f, lo + (hi - lo) * i / n, lambda, 1).residual;
    if ((r > 0) != (prev > 0)) ++changes;
    prev = r;
  }
  return changes;
}

}  // namespace

TEST_CASE("circular branches are constant in lambda") {
  const auto ens = share(build_circular_polygon(2));
  const HomotopyField field(ens);
  const auto sys = ConservativeSystem::from_ensemble(*ens);
  for (int p : {1, 3, 5}) {
    const auto seed = solve_seed(sys, p, 1);
    const auto br = continue_branch(field, seed);
    CHECK(br.status == BranchStatus::kReachedLambdaOne);
    CHECK(br.points.back().lambda == 1.0);
    double drift = 0.0;
    for (const auto& pt : br.points) {
      drift = std::max(drift, std::abs(pt.zeta - seed.level.amplitude));
      CHECK(pt.zero_count == 2 * p);
      CHECK(std::abs(pt.residual) <= 1e-10);
    }
    CHECK(drift <= 1e-10);
    CHECK(br.folds.empty());
  }
}

TEST_CASE("Kepler branch reaches lambda = 1 and verifies") {
  const auto ens = share(build_kepler_pair(0.2));
  const HomotopyField field(ens);
  const auto seed = solve_seed(ConservativeSystem::from_ensemble(*ens), 1, 1);
  ContinuationConfig cfg;
  const auto br = continue_branch(field, seed, cfg);
  REQUIRE(br.status == BranchStatus::kReachedLambdaOne);
  for (std::size_t k = 1; k < br.points.size(); ++k) {
    const auto& a = br.points[k - 1];
    const auto& b = br.points[k];
    CHECK(std::hypot(b.lambda - a.lambda, (b.zeta - a.zeta) / br.seed_zeta) <= cfg.max_step);
    CHECK(b.zero_count == 2);
    CHECK(b.sign_changes == 2);
    CHECK(b.sup_norm < br.m_user);
  }
  const auto direct = integrate_full(field, br.points.back().zeta, 1.0, 1);
  const auto report = verify_solution(direct, field, 1.0, 1, 1);
  CHECK(report.passed);
  CHECK(report.ode_residual <= 1e-6);
  CHECK(report.symmetry.antiperiodicity <= 1e-8);
  // The sup-norm monitor at 100 zeta0 never fires on this branch.
  ContinuationConfig tight;
  tight.m_user = 100.0 * seed.level.amplitude;
  CHECK(continue_branch(field, seed, tight).status == BranchStatus::kReachedLambdaOne);
}

TEST_CASE("bound monitor") {
  const auto ens = share(build_circular_polygon(2));
  const HomotopyField field(ens);
  const auto seed = solve_seed(ConservativeSystem::from_ensemble(*ens), 1, 1);
  ContinuationConfig cfg;
  cfg.m_user = 0.5 * seed.level.amplitude;
  const auto br = continue_branch(field, seed, cfg);
  CHECK(br.status == BranchStatus::kBoundExceeded);
  CHECK(br.points.size() == 1);
  cfg.m_user = 10.0 * seed.level.amplitude;
  CHECK(continue_branch(field, seed, cfg).status == BranchStatus::kReachedLambdaOne);

  BranchPoint pt;
  pt.sup_norm = 2.0;
  CHECK(monitor_bound(pt, 1.0) == MonitorVerdict::kBoundExceeded);
  CHECK(monitor_bound(pt, 3.0) == MonitorVerdict::kOk);
}

TEST_CASE("trivial monitor") {
  BranchPoint zero;
  CHECK(monitor_trivial(zero, 1e-9) == MonitorVerdict::kTrivialCollapse);
  zero.sup_norm = 0.1;
  CHECK(monitor_trivial(zero, 1e-9) == MonitorVerdict::kOk);

  // Decreasing frequency drives the small-amplitude root into z = 0 at
  // lambda = 0.4.
  const testing::FoldingField field(1.2, -0.5);
  const double zeta0 = root_between(field, 0.0, 0.3, 1.0);
  FieldBounds bounds;
  bounds.m = bounds.M = 33.0;
  const auto br = track_branch(field, 1, 1, zeta0, ShootingMode::kAntiPeriodic, {}, bounds);
  CHECK(br.status == BranchStatus::kTrivialCollapse);
  CHECK(br.contradicts_trivial_exclusion);
  CHECK(std::abs(br.points.back().lambda - 0.4) < 0.05);
  FieldBounds inside;
  inside.m = 0.5;
  inside.M = 2.0;
  CHECK_FALSE(track_branch(field, 1, 1, zeta0, ShootingMode::kAntiPeriodic, {}, inside).contradicts_trivial_exclusion);
}

TEST_CASE("an engineered fold is rounded and reported") {
  const testing::FoldingField field(1.2, 0.5);
  const double zeta0 = root_between(field, 0.0, 1.1, 1.6);  // large-amplitude root
  const auto br = track_branch(field, 1, 1, zeta0, ShootingMode::kAntiPeriodic);
  CHECK(br.status == BranchStatus::kFoldBeyondLimit);
  REQUIRE(br.folds.size() == 1);
  const double fold = br.folds.front().lambda;
  // Dense residual map: two roots just below the fold, none just above.
  CHECK(sign_changes_on_grid(field, fold - 0.01, 0.3, 1.8, 300) == 2);
  CHECK(sign_changes_on_grid(field, fold + 0.01, 0.3, 1.8, 300) == 0);
  CHECK(std::abs(br.folds.front().zeta - 1.088) < 0.05);
  // The far end is the small-amplitude root of lambda = 0.
  CHECK(br.points.back().zeta < 1.0);

  ContinuationConfig no_folds;
  no_folds.max_folds = 0;
  CHECK(track_branch(field, 1, 1, zeta0, ShootingMode::kAntiPeriodic, no_folds).status ==
        BranchStatus::kFoldBeyondLimit);
}

TEST_CASE("step failure when the corrector cannot converge") {
  const auto ens = share(build_circular_polygon(2));
  const HomotopyField field(ens);
  const auto seed = solve_seed(ConservativeSystem::from_ensemble(*ens), 1, 1);
  ContinuationConfig cfg;
  cfg.max_newton_iterations = 0;
  cfg.corrector_tolerance = 1e-30;
  CHECK_THROWS_WITH_AS(continue_branch(field, seed, cfg), doctest::Contains("SeedInvalid"), Error);
}

TEST_CASE("distinct branches stay apart and duplicates are flagged") {
  const auto ens = share(build_circular_polygon(2));
  const HomotopyField field(ens);
  const auto sys = ConservativeSystem::from_ensemble(*ens);
  std::vector<Branch> branches;
  for (int p : {1, 3, 5}) branches.push_back(continue_branch(field, solve_seed(sys, p, 1)));
  const auto report = distinctness_check(field, branches);
  CHECK(report.all_distinct);
  CHECK(report.pairs.size() == 3);
  for (const auto& pair : report.pairs) CHECK(pair.min_separation > 1e-3);

  branches.push_back(branches.front());
  const auto dup = distinctness_check(field, branches);
  CHECK(dup.all_distinct);
  int flagged = 0;
  for (const auto& pair : dup.pairs) flagged += pair.duplicate_input ? 1 : 0;
  CHECK(flagged == 1);

  branches.back().points[1].zero_count = 4;
  CHECK_THROWS_WITH_AS(distinctness_check(field, branches), doctest::Contains("InvariantViolation"), Error);
}
