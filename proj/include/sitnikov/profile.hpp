#pragma once

// Sampled satellite profiles, their symmetric extension and zero counting.

#include <cstddef>
#include <vector>

namespace sitnikov {

enum class ShootingMode {
  kAntiPeriodic,  // even, z(t + pi q) = -z(t); unknown window [0, pi q / 2]
  kRelaxedEven,   // even and 2 pi q periodic only; unknown window [0, pi q]
};

/// Samples on the shooting window [0, t_end], uniform spacing.
struct QuarterProfile {
  std::vector<double> t;
  std::vector<double> z;
  std::vector<double> zdot;
  std::vector<double> zddot;
};

struct SymmetryResiduals {
  double evenness = 0.0;         // max |z(t) - z(-t)|
  double antiperiodicity = 0.0;  // max |z(t) + z(t + pi q)|
  double midpoint_zero = 0.0;    // |z(pi q / 2)|
};

/// N uniform samples on [0, 2 pi q), N divisible by 4.
struct FullProfile {
  int q = 1;
  double period = 0.0;
  ShootingMode mode = ShootingMode::kAntiPeriodic;
  std::vector<double> t;
  std::vector<double> z;
  std::vector<double> zdot;
  std::vector<double> zddot;
  int zero_count = 0;
  SymmetryResiduals residuals;
  double junction_mismatch = 0.0;

  std::size_t size() const { return t.size(); }
  double spacing() const { return period / static_cast<double>(t.size()); }
};

/// Number of uniform samples on [0, 2 pi q) for a given density per 2 pi,
/// rounded up to a multiple of 4.
std::size_t profile_samples(int q, std::size_t samples_per_period);

/// Extends a window profile to the full period. The window holds
/// N/4 + 1 samples (anti-periodic) or N/2 + 1 samples (relaxed) on the
/// uniform grid of spacing 2 pi q / N. Throws Error(kResidualTooLarge) when
/// the window end does not satisfy its boundary condition, or when zdot(0)
/// is not zero, to within `tolerance`.
FullProfile reconstruct_full(const QuarterProfile& window, int q, ShootingMode mode,
                             double tolerance);

SymmetryResiduals symmetry_residuals(const FullProfile& profile);

struct ZeroCount {
  int winding = 0;
  double winding_integral = 0.0;
  int sign_changes = 0;
};

/// Winding integral (1/pi) int (zdot^2 - zddot z) / (z^2 + zdot^2) dt by the
/// periodic trapezoid rule, cross-checked against cyclic sign changes.
/// Throws Error(kDegenerateProfile) if z^2 + zdot^2 nearly vanishes somewhere.
ZeroCount zero_count_details(const FullProfile& profile);

/// As above; throws Error(kCountMismatch) if the two counts disagree.
int count_zeros(const FullProfile& profile);

double sup_norm(const FullProfile& profile);

}  // namespace sitnikov
