#pragma once

// Neumann Sturm-Liouville problem for the linearization at z = 0:
//   -z'' + z = eta F(t) z,  z'(0) = z'(pi q) = 0.

#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "sitnikov/field.hpp"
#include "sitnikov/ode.hpp"

namespace sitnikov {

using Weight = std::function<double(double)>;

struct SpectralOptions {
  ode::Options integrator{1e-12, 1e-12};
  double eta_tolerance = 1e-13;  // relative, on the root in eta
  double max_eta = 1e8;          // search window for the bracket
  bool estimate_error = true;    // second solve at 10x looser tolerance
  int threads = 1;
};

struct SpectralReport {
  double lambda = 0.0;
  int q = 1;
  int p_max = 0;
  std::vector<double> etas;
  std::vector<double> mus;
  std::vector<double> error_estimates;
  std::vector<int> interior_zeros;  // sign changes of the eigenfunction in (0, pi q)
  // Filled when bounds are known.
  std::vector<double> bounds_lo;
  std::vector<double> bounds_hi;
  std::vector<bool> verdicts;  // mu != 1 beyond the error margin
};

/// ceil(sqrt(M)) q + 2.
int default_p_max(const FieldBounds& bounds, int q);

/// Eigenvalues eta_0 < ... < eta_pmax by Prüfer-angle shooting. Throws
/// Error(kIndexNotBracketed) if an index needs eta beyond max_eta and
/// Error(kWeightNotPositive) if F <= 0 is ever sampled.
SpectralReport sturm_eigenvalues(const Weight& weight, double lambda, int p_max, int q,
                                 const SpectralOptions& options = {},
                                 const std::optional<FieldBounds>& bounds = std::nullopt);

/// Uses F = field.weight(t, lambda). A negative p_max selects default_p_max.
SpectralReport sturm_eigenvalues(const HomotopyField& field, double lambda, int p_max, int q,
                                 const SpectralOptions& options = {},
                                 const std::optional<FieldBounds>& bounds = std::nullopt);

struct IndexVerdict {
  int p = 0;
  double eta = 0.0;
  double mu = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool within_bounds = false;
  bool excluded = false;  // (p/q)^2 outside [m, M]
  /// The sandwich alone forces mu != 1: (p/q)^2 < m - 1 or > M - 1.
  bool forced_nondegenerate = false;
  bool mu_not_one = false;
  /// Excluded, yet the sandwich still admits mu = 1: (p/q)^2 in [m - 1, m).
  bool comparison_gap = false;
  /// m/(m+1) <= mu <= M/(M+1); reported only.
  bool two_sided_display_holds = false;
};

/// Checks (1 + (p/q)^2)/M <= eta_p <= (1 + (p/q)^2)/m for every index and
/// mu_p != 1 wherever the sandwich forces it. Throws Error(kBoundViolated)
/// on failure.
std::vector<IndexVerdict> verify_comparison_bounds(const SpectralReport& report, const FieldBounds& bounds);

/// Cross-check: second-order finite differences on a cell-centred grid of
/// `cells` cells over [0, pi q], returning the lowest `count` eigenvalues.
std::vector<double> finite_difference_eigenvalues(const Weight& weight, int q, std::size_t cells,
                                                  std::size_t count);

}  // namespace sitnikov
