#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "sitnikov/error.hpp"
#include "sitnikov/numerics.hpp"
#include "sitnikov/trig_series.hpp"

using namespace sitnikov;
using std::numbers::pi;

TEST_CASE("Gauss-Legendre integrates polynomials of degree 2n-1 exactly") {
  const auto rule = numerics::gauss_legendre(6);
  double sum = 0.0, wsum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    sum += rule.weights[i] * std::pow(rule.nodes[i], 10);
    wsum += rule.weights[i];
  }
  CHECK(std::abs(wsum - 2.0) < 1e-14);
  CHECK(std::abs(sum - 2.0 / 11.0) < 1e-14);
}

TEST_CASE("adaptive quadrature handles a sharp peak") {
  const double eps = 1e-4;
  const auto f = [eps](double x) { return eps / (x * x + eps * eps); };
  const double value = numerics::integrate_adaptive(f, -1.0, 1.0, 1e-13);
  CHECK(std::abs(value - 2.0 * std::atan(1.0 / eps)) < 1e-11);
}

TEST_CASE("Brent finds the root of cos on [1, 2]") {
  const double r = numerics::brent_root([](double x) { return std::cos(x); }, 1.0, 2.0);
  CHECK(std::abs(r - pi / 2) < 1e-14);
  CHECK_THROWS_AS(numerics::brent_root([](double x) { return x * x + 1.0; }, -1.0, 1.0), Error);
}

TEST_CASE("golden section locates an interior maximum") {
  const auto [x, fx] = numerics::golden_section_max([](double t) { return -(t - 0.3) * (t - 0.3); }, 0.0, 1.0);
  CHECK(std::abs(x - 0.3) < 1e-7);
  CHECK(std::abs(fx) < 1e-13);
}

TEST_CASE("periodic differences reproduce derivatives of sin(3t)") {
  const std::size_t n = 256;
  const double h = 2.0 * pi / n;
  std::vector<double> f(n);
  for (std::size_t k = 0; k < n; ++k) f[k] = std::sin(3.0 * h * k);
  const auto d1 = numerics::periodic_derivative(f, h, 1);
  const auto d2 = numerics::periodic_derivative(f, h, 2);
  double e1 = 0.0, e2 = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    e1 = std::max(e1, std::abs(d1[k] - 3.0 * std::cos(3.0 * h * k)));
    e2 = std::max(e2, std::abs(d2[k] + 9.0 * std::sin(3.0 * h * k)));
  }
  CHECK(e1 < 1e-10);
  CHECK(e2 < 1e-9);
}

TEST_CASE("trigonometric interpolation is exact for band-limited data") {
  for (std::size_t n : {16u, 17u}) {
    std::vector<double> s(n);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = pi * k / n;
      s[k] = 0.5 + std::cos(2.0 * t) - 0.25 * std::sin(6.0 * t);
    }
    const auto series = TrigSeries::fit(s, pi);
    CHECK(series.harmonics() <= n / 2);
    for (double t : {0.1, 0.77, 2.5}) {
      CHECK(std::abs(series(t) - (0.5 + std::cos(2.0 * t) - 0.25 * std::sin(6.0 * t))) < 1e-13);
      CHECK(std::abs(series.derivative(t) - (-2.0 * std::sin(2.0 * t) - 1.5 * std::cos(6.0 * t))) < 1e-12);
    }
  }
  CHECK(TrigSeries::constant(2.0, pi)(1.3) == 2.0);
}
