#include <doctest.h>

#include <cmath>
#include <memory>
#include <numbers>
#include <random>

#include "sitnikov/error.hpp"
#include "sitnikov/field.hpp"

using namespace sitnikov;
using std::numbers::pi;

namespace {

std::shared_ptr<const PrimaryEnsemble> kepler(double e) {
  return std::make_shared<const PrimaryEnsemble>(build_kepler_pair(e));
}

}  // namespace

TEST_CASE("homotopy endpoints") {
  const HomotopyField field(kepler(0.4));
  const auto& beta_j = field.ensemble().constants().beta_j;
  for (double t : {0.0, 0.7, 2.2}) {
    CHECK(field.effective_radius(0, t, 0.0) == beta_j[0]);
    CHECK(field.effective_radius(1, t, 1.0) == field.ensemble().orbits()[1].radius(t));
    const double mid = field.effective_radius(0, t, 0.25);
    CHECK(std::abs(mid - (0.75 * beta_j[0] + 0.25 * field.ensemble().orbits()[0].radius(t))) < 1e-15);
    CHECK(mid <= beta_j[0]);
    CHECK(mid >= field.ensemble().constants().alpha_j[0]);
  }
  CHECK_THROWS_AS(field.effective_radius(0, 0.0, 1.5), Error);
  CHECK_THROWS_AS(field.evaluate(0.0, 0.1, -0.01), Error);
}

TEST_CASE("potential values at z = 0 and at lambda = 0") {
  const HomotopyField field(kepler(0.2));
  const auto u = field.potential(0.3, 0.0, 0.6);
  double expect = 0.0;
  for (std::size_t j = 0; j < 2; ++j) expect -= 0.5 / field.effective_radius(j, 0.3, 0.6);
  CHECK(std::abs(u.value - expect) < 1e-14);
  CHECK(u.dz == 0.0);
  const double b = field.ensemble().constants().beta_j[0];
  for (double t : {0.0, 1.0, 2.0}) {
    CHECK(std::abs(field.potential(t, 0.4, 0.0).value + 1.0 / std::sqrt(b * b + 0.16)) < 1e-14);
  }
}

TEST_CASE("derivatives agree with finite differences of the potential") {
  const HomotopyField field(kepler(0.2));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ut(0.0, pi), uz(-1.5, 1.5), ul(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    const double t = ut(rng), z = uz(rng), l = ul(rng);
    const double h = 1e-3;
    const auto U = [&](double zz) { return field.potential(t, zz, l).value; };
    const auto dU = [&](double zz) { return field.potential(t, zz, l).dz; };
    const double fd1 = (-U(z + 2 * h) + 8 * U(z + h) - 8 * U(z - h) + U(z - 2 * h)) / (12 * h);
    const double fd2 = (-dU(z + 2 * h) + 8 * dU(z + h) - 8 * dU(z - h) + dU(z - 2 * h)) / (12 * h);
    const auto s = field.potential(t, z, l);
    CHECK(std::abs(s.dz - fd1) < 1e-7);
    CHECK(std::abs(s.dzz - fd2) < 1e-7);
    // Evenness in z is exact.
    CHECK(field.potential(t, -z, l).value == s.value);
    const auto f = field.evaluate(t, z, l);
    CHECK(f.acceleration == doctest::Approx(-s.dz).epsilon(1e-13));
    CHECK(f.stiffness == doctest::Approx(-s.dzz).epsilon(1e-12));
    const double hl = 1e-4;
    const double fdl = (field.evaluate(t, z, std::min(1.0, l + hl)).acceleration -
                        field.evaluate(t, z, std::max(0.0, l - hl)).acceleration) /
                       (std::min(1.0, l + hl) - std::max(0.0, l - hl));
    CHECK(std::abs(f.lambda_sensitivity - fdl) < 1e-6);
  }
}

TEST_CASE("the ensemble is reversible so the potential is even in t") {
  const HomotopyField field(kepler(0.5));
  for (double t : {0.1, 0.9, 1.7}) {
    CHECK(std::abs(field.potential(-t, 0.3, 0.7).value - field.potential(t, 0.3, 0.7).value) < 1e-12);
    CHECK(std::abs(field.potential(t + pi, 0.3, 0.7).value - field.potential(t, 0.3, 0.7).value) < 1e-12);
  }
}

TEST_CASE("weight and bounds") {
  const HomotopyField circ(std::make_shared<const PrimaryEnsemble>(build_circular_polygon(2)));
  for (double l : {0.0, 0.5, 1.0}) CHECK(std::abs(circ.weight(0.4, l) - 33.0) < 1e-10);
  const auto cb = field_bounds(circ.ensemble());
  CHECK(std::abs(cb.m - 33.0) < 1e-10);
  CHECK(std::abs(cb.M - 33.0) < 1e-10);
  CHECK(cb.excludes(5, 1));
  CHECK(cb.excludes(6, 1));

  const auto ens = build_kepler_pair(0.5);
  const auto kb = field_bounds(ens);
  CHECK(std::abs(kb.m - (32.0 / 3.375 + 1.0)) < 1e-9);
  CHECK(std::abs(kb.M - 257.0) < 1e-7);
  CHECK(kb.scan_M <= kb.M + 1e-8);
  CHECK(kb.m <= kb.M);
  CHECK(kb.excludes(3, 1));
  CHECK_FALSE(kb.excludes(4, 1));
  CHECK(kb.excludes(3, 2));  // 2.25 < m
  CHECK_FALSE(kb.excludes(16, 1));
  CHECK(kb.excludes(17, 1));

  const HomotopyField kf(std::make_shared<const PrimaryEnsemble>(ens));
  for (int k = 0; k < 64; ++k) {
    const double f = kf.weight(pi * k / 64.0, 1.0);
    CHECK(f >= kb.m - 1e-9);
    CHECK(f <= kb.M + 1e-9);
  }
}
