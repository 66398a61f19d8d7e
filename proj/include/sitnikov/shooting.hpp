#pragma once

// One-dimensional shooting for even satellite orbits: the amplitude zeta is
// the only unknown, the boundary condition sits at the end of the window.

#include <optional>
#include <string>

#include "sitnikov/field.hpp"
#include "sitnikov/ode.hpp"
#include "sitnikov/profile.hpp"

namespace sitnikov {

/// 1e-10 leaves too little headroom for 1e-9 energy drift and 1e-8 symmetry
/// checks over long windows.
inline constexpr double kDefaultIntegratorTolerance = 1e-12;
inline constexpr std::size_t kDefaultSamplesPerPeriod = 512;

struct ShotOptions {
  ode::Options integrator{kDefaultIntegratorTolerance, kDefaultIntegratorTolerance};
  std::size_t samples_per_period = kDefaultSamplesPerPeriod;
  ShootingMode mode = ShootingMode::kAntiPeriodic;
  bool record_profile = false;
};

struct ShotResult {
  double residual = 0.0;                  // z(pi q / 2), or zdot(pi q) when relaxed
  double derivative_wrt_amplitude = 0.0;  // from the variational flow
  double derivative_wrt_lambda = 0.0;
  QuarterProfile quarter_profile;         // filled when record_profile is set
  std::vector<double> variation;          // y(t) on the same grid
  ode::Stats stats;
  double tolerance = 0.0;
};

/// Integrates z'' = a(t, z, lambda) from z(0) = zeta, z'(0) = 0 over the
/// shooting window together with the amplitude and lambda variations.
ShotResult shoot(const SatelliteField& field, double zeta, double lambda, int q,
                 const ShotOptions& options = {});

/// Direct integration over the whole window [0, 2 pi q) sampled on the
/// profile grid; symmetries are not imposed.
FullProfile integrate_full(const SatelliteField& field, double zeta, double lambda, int q,
                           const ShotOptions& options = {});

/// Shoot and extend by symmetry.
FullProfile shoot_profile(const SatelliteField& field, double zeta, double lambda, int q,
                          const ShotOptions& options, double reconstruction_tolerance);

struct VerificationTolerances {
  double ode = 1e-6;
  double symmetry = 1e-8;
};

struct VerificationReport {
  double lambda = 0.0;
  int p = 0;
  int q = 0;
  double ode_residual = 0.0;       // max |z''_interp - a(t, z, lambda)|
  double velocity_residual = 0.0;  // max |z'_interp - zdot|
  SymmetryResiduals symmetry;
  std::optional<int> zero_count;
  int expected_zero_count = 0;
  std::string zero_count_error;
  double sup_norm = 0.0;
  VerificationTolerances tolerances;
  bool ode_ok = false;
  bool symmetry_ok = false;
  bool zeros_ok = false;
  bool passed = false;
  std::size_t samples_per_period = 0;
};

/// Re-differentiates the sampled profile with periodic 8th-order differences
/// and checks the ODE, the symmetry class and the zero count 2p.
VerificationReport verify_solution(const FullProfile& profile, const SatelliteField& field,
                                   double lambda, int p, int q,
                                   const VerificationTolerances& tolerances = {});

/// Integrates the orbit through (zeta, lambda) over [0, 2 pi q) and verifies
/// it. The sample grid starts at options.samples_per_period and doubles up to
/// max_samples_per_period while the check fails and the ODE residual still
/// shrinks by at least half, so only discretization error of the check
/// itself is refined away. `profile`, when given, receives the last profile.
VerificationReport verify_orbit(const SatelliteField& field, double zeta, double lambda, int p, int q,
                                const ShotOptions& options = {}, const VerificationTolerances& tolerances = {},
                                std::size_t max_samples_per_period = 8192, FullProfile* profile = nullptr);

}  // namespace sitnikov
