#pragma once

// The autonomous problem with every primary frozen at its maximum radius:
// z'' = -U0'(z), U0(z) = -sum m_j (beta_j^2 + z^2)^(-1/2).

#include <vector>

#include "sitnikov/field.hpp"
#include "sitnikov/shooting.hpp"

namespace sitnikov {

struct EnergyLevel {
  double energy = 0.0;
  double amplitude = 0.0;  // zeta with U0(zeta) = energy
  double period = 0.0;
};

class ConservativeSystem final : public SatelliteField {
 public:
  ConservativeSystem(std::vector<double> masses, std::vector<double> radii);
  static ConservativeSystem from_ensemble(const PrimaryEnsemble& ensemble);

  const std::vector<double>& masses() const { return masses_; }
  const std::vector<double>& radii() const { return radii_; }

  double potential(double z) const;
  double dpotential(double z) const;
  double d2potential(double z) const;
  /// U0(zeta) - U0(0) without cancellation.
  double excess_energy(double zeta) const;

  /// U0(0), the bottom of the well.
  double min_energy() const { return min_energy_; }
  /// sum m_j / beta_j^3; small oscillations have period 2 pi / sqrt(beta).
  double beta() const { return beta_; }
  double small_oscillation_period() const;

  /// Throws Error(kEnergyOutOfRange) unless min_energy() < E < 0.
  double amplitude_of_energy(double energy) const;
  /// Period of the oscillation with turning point zeta (zeta >= 0).
  double period_of_amplitude(double zeta) const;
  double period_function(double energy) const;
  EnergyLevel level(double energy) const;

  /// Twice the time between the first two zeros of the IVP z(0) = zeta(E),
  /// z'(0) = 0, located by event detection on the dense output.
  double period_by_integration(double energy, const ode::Options& options = {}) const;

  /// lambda is ignored; t-independent.
  FieldSample evaluate(double t, double z, double lambda) const override;

 private:
  std::vector<double> masses_;
  std::vector<double> radii_;
  double min_energy_ = 0.0;
  double beta_ = 0.0;
  double total_mass_ = 0.0;
};

struct SeedOptions {
  bool relaxed_symmetry = false;
  ShotOptions shot{};
  double symmetry_tolerance = 1e-8;
};

struct SeedSolution {
  int p = 0;
  int q = 0;
  EnergyLevel level;
  FullProfile profile;  // direct integration over [0, 2 pi q)
  int zero_count = 0;
  bool relaxed = false;
  double energy_drift = 0.0;  // max |E(t) - E(0)| on the profile samples
  double window_residual = 0.0;
  double derivative_wrt_amplitude = 0.0;
};

/// Seed orbit with period 2 pi q / p. Throws Error(kNoSeed) when
/// 2 pi q / p <= 2 pi / sqrt(beta), Error(kAntiperiodicityUnattainable) for
/// even p without relaxed symmetry, Error(kBracketFailure) when no bracket
/// can be built, and Error(kSeedInvalid) if the integrated orbit fails its
/// zero-count or symmetry checks.
SeedSolution solve_seed(const ConservativeSystem& system, int p, int q, const SeedOptions& options = {});

struct VariationalSolution {
  std::vector<double> t;
  std::vector<double> y;  // dz/dzeta along the seed
  double derivative = 0.0;  // value at the end of the shooting window
};

VariationalSolution variational_solution(const ConservativeSystem& system, const SeedSolution& seed,
                                         const ShotOptions& options = {});

}  // namespace sitnikov
