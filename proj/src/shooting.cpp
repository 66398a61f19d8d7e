#include "sitnikov/shooting.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "sitnikov/error.hpp"
#include "sitnikov/numerics.hpp"

namespace sitnikov {

namespace {

// z, zdot, y = dz/dzeta, ydot, v = dz/dlambda, vdot
using ShotState = std::array<double, 6>;
using PlainState = std::array<double, 2>;

std::vector<double> grid_stops(double h, std::size_t first, std::size_t last) {
  std::vector<double> stops;
  stops.reserve(last - first + 1);
  for (std::size_t k = first; k <= last; ++k) stops.push_back(h * static_cast<double>(k));
  return stops;
}

}  // namespace

ShotResult shoot(const SatelliteField& field, double zeta, double lambda, int q,
                 const ShotOptions& options) {
  if (q < 1) throw Error(ErrorCode::kInvalidArgument, "q must be >= 1");
  if (!std::isfinite(zeta)) throw Error(ErrorCode::kNonFiniteState, "non-finite amplitude");
  const bool relaxed = options.mode == ShootingMode::kRelaxedEven;
  const std::size_t n = profile_samples(q, options.samples_per_period);
  const std::size_t last = relaxed ? n / 2 : n / 4;
  const double h = 2.0 * std::numbers::pi * q / static_cast<double>(n);
  // Computed as a multiple of h so the window end coincides with a grid point.
  const double t_end = h * static_cast<double>(last);

  const auto rhs = [&field, lambda](double t, const ShotState& s, ShotState& ds) {
    const FieldSample f = field.evaluate(t, s[0], lambda);
    ds[0] = s[1];
    ds[1] = f.acceleration;
    ds[2] = s[3];
    ds[3] = f.stiffness * s[2];
    ds[4] = s[5];
    ds[5] = f.stiffness * s[4] + f.lambda_sensitivity;
  };

  ShotResult out;
  out.tolerance = options.integrator.rtol;
  ShotState y{zeta, 0.0, 1.0, 0.0, 0.0, 0.0};
  const auto record = [&](double t, const ShotState& s) {
    out.quarter_profile.t.push_back(t);
    out.quarter_profile.z.push_back(s[0]);
    out.quarter_profile.zdot.push_back(s[1]);
    out.quarter_profile.zddot.push_back(field.evaluate(t, s[0], lambda).acceleration);
    out.variation.push_back(s[2]);
  };

  if (options.record_profile) {
    record(0.0, y);
    const auto stops = grid_stops(h, 1, last);
    ode::integrate(rhs, 0.0, y, t_end, options.integrator, stops,
                   [&](const ode::Step<ShotState>& step) {
                     if (step.at_stop) record(step.t1, step.y1);
                     return true;
                   },
                   &out.stats);
  } else {
    ode::integrate(rhs, 0.0, y, t_end, options.integrator, &out.stats);
  }

  if (relaxed) {
    out.residual = y[1];
    out.derivative_wrt_amplitude = y[3];
    out.derivative_wrt_lambda = y[5];
  } else {
    out.residual = y[0];
    out.derivative_wrt_amplitude = y[2];
    out.derivative_wrt_lambda = y[4];
  }
  return out;
}

FullProfile integrate_full(const SatelliteField& field, double zeta, double lambda, int q,
                           const ShotOptions& options) {
  const std::size_t n = profile_samples(q, options.samples_per_period);
  FullProfile out;
  out.q = q;
  out.mode = options.mode;
  out.period = 2.0 * std::numbers::pi * q;
  const double h = out.period / static_cast<double>(n);

  const auto rhs = [&field, lambda](double t, const PlainState& s, PlainState& ds) {
    ds[0] = s[1];
    ds[1] = field.evaluate(t, s[0], lambda).acceleration;
  };
  const auto record = [&](double t, const PlainState& s) {
    out.t.push_back(t);
    out.z.push_back(s[0]);
    out.zdot.push_back(s[1]);
    out.zddot.push_back(field.evaluate(t, s[0], lambda).acceleration);
  };
  PlainState y{zeta, 0.0};
  record(0.0, y);
  const auto stops = grid_stops(h, 1, n - 1);
  ode::integrate(rhs, 0.0, y, stops.back(), options.integrator, stops,
                 [&](const ode::Step<PlainState>& step) {
                   if (step.at_stop) record(step.t1, step.y1);
                   return true;
                 });
  out.residuals = symmetry_residuals(out);
  try {
    out.zero_count = count_zeros(out);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::kDegenerateProfile && e.code() != ErrorCode::kCountMismatch) throw;
    out.zero_count = -1;
  }
  return out;
}

FullProfile shoot_profile(const SatelliteField& field, double zeta, double lambda, int q,
                          const ShotOptions& options, double reconstruction_tolerance) {
  ShotOptions opts = options;
  opts.record_profile = true;
  const ShotResult shot = shoot(field, zeta, lambda, q, opts);
  return reconstruct_full(shot.quarter_profile, q, options.mode, reconstruction_tolerance);
}

VerificationReport verify_solution(const FullProfile& profile, const SatelliteField& field,
                                   double lambda, int p, int q,
                                   const VerificationTolerances& tolerances) {
  VerificationReport r;
  r.lambda = lambda;
  r.p = p;
  r.q = q;
  r.tolerances = tolerances;
  r.expected_zero_count = 2 * p;
  const std::size_t n = profile.z.size();
  if (n < 16 || profile.zdot.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "profile too short to verify");
  }
  const double h = profile.spacing();
  const auto d1 = numerics::periodic_derivative(profile.z, h, 1);
  const auto d2 = numerics::periodic_derivative(profile.z, h, 2);
  for (std::size_t k = 0; k < n; ++k) {
    const double a = field.evaluate(profile.t[k], profile.z[k], lambda).acceleration;
    r.ode_residual = std::max(r.ode_residual, std::abs(d2[k] - a));
    r.velocity_residual = std::max(r.velocity_residual, std::abs(d1[k] - profile.zdot[k]));
  }
  r.symmetry = symmetry_residuals(profile);
  r.sup_norm = sup_norm(profile);
  try {
    r.zero_count = count_zeros(profile);
  } catch (const Error& e) {
    r.zero_count_error = e.what();
  }

  r.ode_ok = r.ode_residual <= tolerances.ode && r.velocity_residual <= tolerances.ode;
  if (profile.mode == ShootingMode::kRelaxedEven) {
    r.symmetry_ok = r.symmetry.evenness <= tolerances.symmetry;
  } else {
    r.symmetry_ok = r.symmetry.evenness <= tolerances.symmetry &&
                    r.symmetry.antiperiodicity <= tolerances.symmetry &&
                    r.symmetry.midpoint_zero <= tolerances.symmetry;
  }
  r.zeros_ok = r.zero_count.has_value() && *r.zero_count == r.expected_zero_count;
  r.passed = r.ode_ok && r.symmetry_ok && r.zeros_ok;
  r.samples_per_period = n / static_cast<std::size_t>(q);
  return r;
}

VerificationReport verify_orbit(const SatelliteField& field, double zeta, double lambda, int p, int q,
                                const ShotOptions& options, const VerificationTolerances& tolerances,
                                std::size_t max_samples_per_period, FullProfile* profile) {
  ShotOptions opts = options;
  FullProfile prof = integrate_full(field, zeta, lambda, q, opts);
  VerificationReport r = verify_solution(prof, field, lambda, p, q, tolerances);
  while (!r.passed && opts.samples_per_period * 2 <= max_samples_per_period) {
    opts.samples_per_period *= 2;
    FullProfile finer = integrate_full(field, zeta, lambda, q, opts);
    VerificationReport next = verify_solution(finer, field, lambda, p, q, tolerances);
    const bool improving = next.ode_residual <= 0.5 * r.ode_residual;
    prof = std::move(finer);
    r = next;
    if (!improving) break;
  }
  if (profile) *profile = std::move(prof);
  return r;
}

}  // namespace sitnikov
