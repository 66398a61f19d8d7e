#pragma once

#include <cstddef>
#include <memory>

#include "sitnikov/primaries.hpp"

namespace sitnikov {

/// Right-hand side of z'' = a(t, z, lambda) and the partial derivatives the
/// shooting and continuation code needs.
struct FieldSample {
  double acceleration = 0.0;
  double stiffness = 0.0;           // d a / d z
  double lambda_sensitivity = 0.0;  // d a / d lambda
};

/// A one-dimensional, lambda-parametrized satellite force law. Implementations
/// used for the symmetric reduction must be even in t, pi-periodic in t and
/// odd in z.
class SatelliteField {
 public:
  virtual ~SatelliteField() = default;
  virtual FieldSample evaluate(double t, double z, double lambda) const = 0;
};

struct PotentialSample {
  double value = 0.0;  // U
  double dz = 0.0;     // dU/dz
  double dzz = 0.0;    // d^2U/dz^2
};

/// Potential of the primaries when each radius is blended between its
/// maximum (lambda = 0) and its true value (lambda = 1):
///   rho_j(t; lambda) = (1 - lambda) beta_j + lambda r_j(t).
class HomotopyField final : public SatelliteField {
 public:
  explicit HomotopyField(std::shared_ptr<const PrimaryEnsemble> ensemble);

  const PrimaryEnsemble& ensemble() const { return *ensemble_; }
  std::shared_ptr<const PrimaryEnsemble> ensemble_ptr() const { return ensemble_; }

  /// Throws Error(kLambdaOutOfRange) outside [0, 1].
  double effective_radius(std::size_t j, double t, double lambda) const;

  PotentialSample potential(double t, double z, double lambda) const;

  /// Sturm-Liouville weight F = sum m_j / rho_j^3 + 1.
  double weight(double t, double lambda) const;

  FieldSample evaluate(double t, double z, double lambda) const override;

 private:
  std::shared_ptr<const PrimaryEnsemble> ensemble_;
  std::vector<double> masses_;
  std::vector<double> beta_j_;
  bool constant_radii_ = false;
};

struct FieldBounds {
  double m = 0.0;       // beta + 1
  double M = 0.0;       // alpha + 1
  double scan_m = 0.0;  // grid infimum of F over (t, lambda)
  double scan_M = 0.0;  // grid supremum
  std::size_t t_samples = 0;
  std::size_t lambda_samples = 0;

  /// True when (p/q)^2 lies outside [m, M].
  bool excludes(int p, int q) const;
};

/// Analytic bounds (beta + 1, alpha + 1) with a grid-scan cross-check. Throws
/// Error(kInvariantViolation) if the scan leaves the analytic interval or
/// misses the attained infimum by more than 1e-8.
FieldBounds field_bounds(const PrimaryEnsemble& ensemble, std::size_t t_samples = 2048,
                         std::size_t lambda_samples = 21);

}  // namespace sitnikov
