#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace sitnikov::numerics {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

/// Gauss-Legendre rule with n points (Newton iteration on P_n).
GaussRule gauss_legendre(std::size_t n);

/// Adaptive composite Gauss-Legendre quadrature: bisects panels until the
/// 20-point panel estimate agrees with its two halves to `rel_tol`.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-14, int max_depth = 40);

/// Golden-section search for the maximizer of f on [a, b]. Returns (x, f(x)).
std::pair<double, double> golden_section_max(const std::function<double(double)>& f, double a,
                                             double b, double x_tol = 1e-13);

/// Bracketing root finder (Brent's method). Requires f(a) and f(b) of
/// opposite sign; throws Error(kBracketFailure) otherwise.
double brent_root(const std::function<double(double)>& f, double a, double b,
                  double x_tol = 1e-15, int max_iter = 200);

/// Periodic central-difference derivative of order 1 or 2 on a uniform grid
/// with spacing h, 8th-order accurate.
std::vector<double> periodic_derivative(std::span<const double> samples, double h, int order);

}  // namespace sitnikov::numerics
