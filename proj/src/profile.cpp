#include "sitnikov/profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sitnikov/error.hpp"

namespace sitnikov {

std::size_t profile_samples(int q, std::size_t samples_per_period) {
  if (q < 1 || samples_per_period < 8) {
    throw Error(ErrorCode::kInvalidArgument, "profile needs q >= 1 and at least 8 samples per period");
  }
  const std::size_t n = samples_per_period * static_cast<std::size_t>(q);
  return (n + 3) / 4 * 4;
}

FullProfile reconstruct_full(const QuarterProfile& window, int q, ShootingMode mode,
                             double tolerance) {
  const std::size_t m = window.z.size();
  if (m < 3 || window.zdot.size() != m || window.zddot.size() != m || window.t.size() != m) {
    throw Error(ErrorCode::kInvalidArgument, "window profile has inconsistent sample arrays");
  }
  const bool relaxed = mode == ShootingMode::kRelaxedEven;
  const std::size_t n = relaxed ? 2 * (m - 1) : 4 * (m - 1);

  FullProfile out;
  out.q = q;
  out.mode = mode;
  out.period = 2.0 * std::numbers::pi * q;
  const double h = out.period / static_cast<double>(n);
  out.t.resize(n);
  out.z.resize(n);
  out.zdot.resize(n);
  out.zddot.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.t[k] = h * static_cast<double>(k);

  const double end_condition = relaxed ? window.zdot.back() : window.z.back();
  out.junction_mismatch = 2.0 * std::max(std::abs(end_condition), std::abs(window.zdot.front()));
  if (std::abs(end_condition) > tolerance || std::abs(window.zdot.front()) > tolerance) {
    std::ostringstream msg;
    msg << "window boundary conditions violated: end " << end_condition << ", zdot(0) "
        << window.zdot.front() << ", tolerance " << tolerance;
    throw Error(ErrorCode::kResidualTooLarge, msg.str());
  }

  if (relaxed) {
    const std::size_t half = n / 2;
    for (std::size_t k = 0; k <= half; ++k) {
      out.z[k] = window.z[k];
      out.zdot[k] = window.zdot[k];
      out.zddot[k] = window.zddot[k];
    }
    for (std::size_t k = half + 1; k < n; ++k) {
      out.z[k] = window.z[n - k];
      out.zdot[k] = -window.zdot[n - k];
      out.zddot[k] = window.zddot[n - k];
    }
  } else {
    const std::size_t quarter = n / 4, half = n / 2;
    for (std::size_t k = 0; k <= quarter; ++k) {
      out.z[k] = window.z[k];
      out.zdot[k] = window.zdot[k];
      out.zddot[k] = window.zddot[k];
    }
    // Reflection through the zero at pi q / 2.
    for (std::size_t k = quarter + 1; k <= half; ++k) {
      out.z[k] = -window.z[half - k];
      out.zdot[k] = window.zdot[half - k];
      out.zddot[k] = -window.zddot[half - k];
    }
    for (std::size_t k = half + 1; k < n; ++k) {
      out.z[k] = -out.z[k - half];
      out.zdot[k] = -out.zdot[k - half];
      out.zddot[k] = -out.zddot[k - half];
    }
  }
  out.residuals = symmetry_residuals(out);
  out.zero_count = count_zeros(out);
  return out;
}

SymmetryResiduals symmetry_residuals(const FullProfile& profile) {
  SymmetryResiduals r;
  const std::size_t n = profile.z.size();
  if (n == 0) return r;
  for (std::size_t k = 1; k < n; ++k) {
    r.evenness = std::max(r.evenness, std::abs(profile.z[k] - profile.z[n - k]));
  }
  if (n % 2 == 0) {
    for (std::size_t k = 0; k < n / 2; ++k) {
      r.antiperiodicity = std::max(r.antiperiodicity, std::abs(profile.z[k] + profile.z[k + n / 2]));
    }
  }
  if (n % 4 == 0) r.midpoint_zero = std::abs(profile.z[n / 4]);
  return r;
}

ZeroCount zero_count_details(const FullProfile& profile) {
  const std::size_t n = profile.z.size();
  if (n < 4 || profile.zdot.size() != n || profile.zddot.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "profile has inconsistent sample arrays");
  }
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double r2 = profile.z[k] * profile.z[k] + profile.zdot[k] * profile.zdot[k];
    lo = std::min(lo, r2);
    hi = std::max(hi, r2);
  }
  if (!(hi > 0.0) || lo <= 1e-20 * hi) {
    throw Error(ErrorCode::kDegenerateProfile, "z^2 + zdot^2 vanishes on the profile");
  }

  ZeroCount out;
  double sum = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double z = profile.z[k], v = profile.zdot[k];
    sum += (v * v - profile.zddot[k] * z) / (z * z + v * v);
  }
  out.winding_integral = sum * profile.period / static_cast<double>(n) / std::numbers::pi;
  out.winding = static_cast<int>(std::lround(out.winding_integral));

  // Cyclic sign changes, skipping samples that are exactly zero.
  int first = 0, last = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const int s = profile.z[k] > 0.0 ? 1 : (profile.z[k] < 0.0 ? -1 : 0);
    if (s == 0) continue;
    if (first == 0) first = s;
    if (last != 0 && s != last) ++out.sign_changes;
    last = s;
  }
  if (first != 0 && last != first) ++out.sign_changes;
  return out;
}

int count_zeros(const FullProfile& profile) {
  const ZeroCount c = zero_count_details(profile);
  if (c.winding != c.sign_changes) {
    std::ostringstream msg;
    msg << "winding integral gives " << c.winding_integral << " but sign changes give "
        << c.sign_changes;
    throw Error(ErrorCode::kCountMismatch, msg.str());
  }
  return c.winding;
}

double sup_norm(const FullProfile& profile) {
  double s = 0.0;
  for (double z : profile.z) s = std::max(s, std::abs(z));
  return s;
}

}  // namespace sitnikov
