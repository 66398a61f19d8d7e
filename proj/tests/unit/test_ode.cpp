#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "sitnikov/ode.hpp"

using namespace sitnikov;

namespace {

using State = std::array<double, 2>;

void oscillator(double, const State& y, State& dy) {
  dy[0] = y[1];
  dy[1] = -y[0];
}

}  // namespace

TEST_CASE("harmonic oscillator matches the closed form at the end point") {
  State y{1.0, 0.0};
  ode::Options opts;
  ode::Stats stats;
  const double t = ode::integrate(oscillator, 0.0, y, 10.0, opts, &stats);
  CHECK(t == 10.0);
  CHECK(std::abs(y[0] - std::cos(10.0)) < 1e-10);
  CHECK(std::abs(y[1] + std::sin(10.0)) < 1e-10);
  CHECK(stats.accepted > 0);
}

TEST_CASE("stops are hit exactly and dense output is accurate inside steps") {
  State y{0.0, 1.0};
  std::vector<double> stops;
  for (int k = 1; k <= 40; ++k) stops.push_back(0.25 * k);
  std::vector<double> hit;
  double worst_dense = 0.0;
  ode::Options opts;
  opts.rtol = opts.atol = 1e-11;
  ode::integrate(oscillator, 0.0, y, 10.0, opts, stops, [&](const ode::Step<State>& s) {
    if (s.at_stop) hit.push_back(s.t1);
    for (int i = 1; i < 8; ++i) {
      const double t = s.t0 + (s.t1 - s.t0) * i / 8.0;
      worst_dense = std::max(worst_dense, std::abs(s.eval(0, t) - std::sin(t)));
    }
    return true;
  });
  REQUIRE(hit.size() == stops.size());
  for (std::size_t k = 0; k < stops.size(); ++k) CHECK(hit[k] == stops[k]);
  CHECK(worst_dense < 1e-8);
}

TEST_CASE("observer can stop the integration early") {
  State y{1.0, 0.0};
  const double t = ode::integrate(oscillator, 0.0, y, 100.0, ode::Options{}, std::span<const double>{},
                                  [](const ode::Step<State>& s) { return s.t1 < 1.0; });
  CHECK(t >= 1.0);
  CHECK(t < 100.0);
}

TEST_CASE("blow-up is reported as a failure") {
  // y' = y^2 from y(0) = 1 explodes at t = 1.
  std::vector<double> y{1.0};
  const auto rhs = [](double, const std::vector<double>& s, std::vector<double>& ds) { ds[0] = s[0] * s[0]; };
  CHECK_THROWS_AS(ode::integrate(rhs, 0.0, y, 2.0, ode::Options{}), Error);
}

TEST_CASE("reversed interval is rejected") {
  State y{1.0, 0.0};
  CHECK_THROWS_AS(ode::integrate(oscillator, 1.0, y, 0.0, ode::Options{}), Error);
}
