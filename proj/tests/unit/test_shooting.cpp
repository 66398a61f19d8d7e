#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "sitnikov/conservative.hpp"
#include "sitnikov/error.hpp"
#include "sitnikov/shooting.hpp"

using namespace sitnikov;
using std::numbers::pi;

namespace {

std::shared_ptr<const PrimaryEnsemble> share(PrimaryEnsemble e) {
  return std::make_shared<const PrimaryEnsemble>(std::move(e));
}

}  // namespace

TEST_CASE("trivial amplitude gives a zero residual") {
  const HomotopyField field(share(build_kepler_pair(0.2)));
  const auto shot = shoot(field, 0.0, 0.6, 1);
  CHECK(shot.residual == 0.0);
  // The linearization at zero is Hill's equation y'' = -(F - 1) y.
  CHECK(std::isfinite(shot.derivative_wrt_amplitude));
  CHECK(shot.derivative_wrt_lambda == 0.0);
}

TEST_CASE("the conservative seed solves the homotopy problem at lambda = 0") {
  const auto ens = share(build_kepler_pair(0.2));
  const HomotopyField field(ens);
  const auto sys = ConservativeSystem::from_ensemble(*ens);
  for (int p : {1, 3}) {
    const auto seed = solve_seed(sys, p, 1);
    CHECK(std::abs(shoot(field, seed.level.amplitude, 0.0, 1).residual) <= 1e-8);
  }
}

TEST_CASE("circular ensembles do not depend on lambda") {
  const HomotopyField field(share(build_circular_polygon(2)));
  for (double zeta : {0.05, 0.3}) {
    const double r0 = shoot(field, zeta, 0.0, 1).residual;
    for (double l : {0.3, 1.0}) CHECK(std::abs(shoot(field, zeta, l, 1).residual - r0) <= 1e-12);
  }
}

TEST_CASE("shooting derivatives match centered differences") {
  const HomotopyField field(share(build_kepler_pair(0.2)));
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> uz(0.02, 0.6), ul(0.05, 0.95);
  for (int i = 0; i < 8; ++i) {
    const double zeta = uz(rng), l = ul(rng);
    const auto s = shoot(field, zeta, l, 1);
    const double hz = 1e-6, hl = 1e-6;
    const double dz = (shoot(field, zeta + hz, l, 1).residual - shoot(field, zeta - hz, l, 1).residual) / (2 * hz);
    const double dl = (shoot(field, zeta, l + hl, 1).residual - shoot(field, zeta, l - hl, 1).residual) / (2 * hl);
    CHECK(std::abs(s.derivative_wrt_amplitude - dz) < 1e-6);
    CHECK(std::abs(s.derivative_wrt_lambda - dl) < 1e-6);
  }
}

TEST_CASE("recorded window lands on the profile grid") {
  const HomotopyField field(share(build_kepler_pair(0.1)));
  ShotOptions opts;
  opts.record_profile = true;
  const auto s = shoot(field, 0.2, 0.5, 2, opts);
  REQUIRE(s.quarter_profile.t.size() == profile_samples(2, 512) / 4 + 1);
  CHECK(std::abs(s.quarter_profile.t.back() - pi) < 1e-14);
  CHECK(s.quarter_profile.z.back() == s.residual);
  CHECK(s.variation.size() == s.quarter_profile.t.size());
}

TEST_CASE("verification accepts seeds and rejects broken profiles") {
  const auto ens = share(build_circular_polygon(2));
  const HomotopyField field(ens);
  const auto sys = ConservativeSystem::from_ensemble(*ens);
  const auto seed = solve_seed(sys, 3, 1);
  const auto good = verify_solution(seed.profile, field, 0.0, 3, 1);
  CHECK(good.passed);
  CHECK(good.ode_residual < 1e-6);
  CHECK(*good.zero_count == 6);

  FullProfile zero = seed.profile;
  std::fill(zero.z.begin(), zero.z.end(), 0.0);
  std::fill(zero.zdot.begin(), zero.zdot.end(), 0.0);
  std::fill(zero.zddot.begin(), zero.zddot.end(), 0.0);
  const auto trivial = verify_solution(zero, field, 0.0, 3, 1);
  CHECK(trivial.ode_residual == 0.0);
  CHECK_FALSE(trivial.zero_count.has_value());
  CHECK(trivial.zero_count_error.find("DegenerateProfile") != std::string::npos);
  CHECK_FALSE(trivial.passed);

  FullProfile bent = seed.profile;
  for (std::size_t k = 0; k < bent.size(); ++k) bent.z[k] += 1e-5 * std::cos(2.0 * bent.t[k]);
  const auto broken = verify_solution(bent, field, 0.0, 3, 1);
  CHECK_FALSE(broken.symmetry_ok);
  CHECK_FALSE(broken.passed);
}

TEST_CASE("shoot_profile agrees with direct integration for a corrected amplitude") {
  const auto ens = share(build_circular_polygon(2));
  const HomotopyField field(ens);
  const auto seed = solve_seed(ConservativeSystem::from_ensemble(*ens), 1, 1);
  const auto rebuilt = shoot_profile(field, seed.level.amplitude, 1.0, 1, ShotOptions{}, 1e-8);
  double worst = 0.0;
  for (std::size_t k = 0; k < rebuilt.size(); ++k) worst = std::max(worst, std::abs(rebuilt.z[k] - seed.profile.z[k]));
  CHECK(worst < 1e-9);
  CHECK(rebuilt.zero_count == 2);
}
