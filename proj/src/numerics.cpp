#include "sitnikov/numerics.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "sitnikov/error.hpp"

namespace sitnikov::numerics {

GaussRule gauss_legendre(std::size_t n) {
  if (n == 0) throw Error(ErrorCode::kInvalidArgument, "gauss_legendre needs n >= 1");
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  const std::size_t half = (n + 1) / 2;
  for (std::size_t i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                        (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double kk = static_cast<double>(k);
        const double p2 = ((2.0 * kk - 1.0) * x * p1 - (kk - 1.0) * p0) / kk;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) {
        p1 = x;
        p0 = 1.0;
      }
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[n - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.nodes[n / 2] = 0.0;
  return rule;
}

namespace {

double panel(const std::function<double(double)>& f, const GaussRule& rule, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double rad = 0.5 * (b - a);
  double acc = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) acc += rule.weights[i] * f(mid + rad * rule.nodes[i]);
  return acc * rad;
}

double adapt(const std::function<double(double)>& f, const GaussRule& rule, double a, double b,
             double whole, double rel_tol, double abs_floor, int depth) {
  const double mid = 0.5 * (a + b);
  const double left = panel(f, rule, a, mid);
  const double right = panel(f, rule, mid, b);
  const double both = left + right;
  if (depth <= 0 || std::abs(both - whole) <= std::max(rel_tol * std::abs(both), abs_floor)) {
    return both;
  }
  return adapt(f, rule, a, mid, left, rel_tol, 0.5 * abs_floor, depth - 1) +
         adapt(f, rule, mid, b, right, rel_tol, 0.5 * abs_floor, depth - 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, int max_depth) {
  static const GaussRule rule = gauss_legendre(20);
  const double whole = panel(f, rule, a, b);
  const double floor = 1e-300;
  return adapt(f, rule, a, b, whole, rel_tol, floor, max_depth);
}

std::pair<double, double> golden_section_max(const std::function<double(double)>& f, double a,
                                             double b, double x_tol) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  while (std::abs(b - a) > x_tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

double brent_root(const std::function<double(double)>& f, double a, double b, double x_tol,
                  int max_iter) {
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw Error(ErrorCode::kBracketFailure, "brent_root: endpoints do not bracket a root");
  }
  double c = a, fc = fa, d = b - a, e = d;
  const double eps = std::numeric_limits<double>::epsilon();
  for (int iter = 0; iter < max_iter; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = e = b - a;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol = 2.0 * eps * std::abs(b) + 0.5 * x_tol;
    const double m = 0.5 * (c - b);
    if (std::abs(m) <= tol || fb == 0.0) return b;
    if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
      double p, q, r;
      const double s = fb / fa;
      if (a == c) {
        p = 2.0 * m * s;
        q = 1.0 - s;
      } else {
        q = fa / fc;
        r = fb / fc;
        p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0));
        q = (q - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) q = -q;
      else p = -p;
      if (2.0 * p < std::min(3.0 * m * q - std::abs(tol * q), std::abs(e * q))) {
        e = d;
        d = p / q;
      } else {
        d = m;
        e = m;
      }
    } else {
      d = m;
      e = m;
    }
    a = b;
    fa = fb;
    b += std::abs(d) > tol ? d : (m > 0.0 ? tol : -tol);
    fb = f(b);
  }
  return b;
}

std::vector<double> periodic_derivative(std::span<const double> samples, double h, int order) {
  static constexpr double first[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
  static constexpr double second[4] = {8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
  static constexpr double second_center = -205.0 / 72.0;
  if (order != 1 && order != 2) {
    throw Error(ErrorCode::kInvalidArgument, "periodic_derivative supports order 1 or 2");
  }
  const std::size_t n = samples.size();
  if (n < 9) throw Error(ErrorCode::kInvalidArgument, "periodic_derivative needs >= 9 samples");
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    double acc = order == 2 ? second_center * samples[k] : 0.0;
    for (std::size_t s = 1; s <= 4; ++s) {
      const double fwd = samples[(k + s) % n];
      const double bwd = samples[(k + n - s) % n];
      acc += order == 1 ? first[s - 1] * (fwd - bwd) : second[s - 1] * (fwd + bwd);
    }
    out[k] = order == 1 ? acc / h : acc / (h * h);
  }
  return out;
}

}  // namespace sitnikov::numerics
