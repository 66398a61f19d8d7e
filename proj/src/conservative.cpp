#include "sitnikov/conservative.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "sitnikov/error.hpp"
#include "sitnikov/numerics.hpp"

namespace sitnikov {

using std::numbers::pi;

ConservativeSystem::ConservativeSystem(std::vector<double> masses, std::vector<double> radii)
    : masses_(std::move(masses)), radii_(std::move(radii)) {
  if (masses_.empty() || masses_.size() != radii_.size()) {
    throw Error(ErrorCode::kInvalidArgument, "conservative system needs matching masses and radii");
  }
  for (std::size_t j = 0; j < masses_.size(); ++j) {
    if (!(masses_[j] > 0.0) || !(radii_[j] > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument, "masses and radii must be positive");
    }
    min_energy_ -= masses_[j] / radii_[j];
    beta_ += masses_[j] / (radii_[j] * radii_[j] * radii_[j]);
    total_mass_ += masses_[j];
  }
}

ConservativeSystem ConservativeSystem::from_ensemble(const PrimaryEnsemble& ensemble) {
  return ConservativeSystem(ensemble.masses(), ensemble.constants().beta_j);
}

double ConservativeSystem::potential(double z) const {
  double u = 0.0;
  for (std::size_t j = 0; j < masses_.size(); ++j) u -= masses_[j] / std::hypot(radii_[j], z);
  return u;
}

double ConservativeSystem::dpotential(double z) const {
  double d = 0.0;
  for (std::size_t j = 0; j < masses_.size(); ++j) {
    const double s2 = radii_[j] * radii_[j] + z * z;
    d += masses_[j] * z / (s2 * std::sqrt(s2));
  }
  return d;
}

double ConservativeSystem::d2potential(double z) const {
  double d = 0.0;
  for (std::size_t j = 0; j < masses_.size(); ++j) {
    const double s2 = radii_[j] * radii_[j] + z * z;
    const double inv3 = 1.0 / (s2 * std::sqrt(s2));
    d += masses_[j] * inv3 - 3.0 * masses_[j] * z * z * inv3 / s2;
  }
  return d;
}

double ConservativeSystem::excess_energy(double zeta) const {
  double e = 0.0;
  for (std::size_t j = 0; j < masses_.size(); ++j) {
    const double b = radii_[j];
    const double a = std::hypot(b, zeta);
    e += masses_[j] * zeta * zeta / (b * a * (a + b));
  }
  return e;
}

double ConservativeSystem::small_oscillation_period() const { return 2.0 * pi / std::sqrt(beta_); }

double ConservativeSystem::amplitude_of_energy(double energy) const {
  const double excess = energy - min_energy_;
  if (!(excess > 0.0) || !(energy < 0.0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "energy " << energy << " outside (" << min_energy_ << ", 0)";
    throw Error(ErrorCode::kEnergyOutOfRange, msg.str());
  }
  // U0(zeta) > -M / zeta, so zeta = 2M / |E| overshoots with margin.
  const double hi = 2.0 * total_mass_ / std::abs(energy);
  const auto f = [this, excess](double zeta) { return excess_energy(zeta) - excess; };
  double zeta = numerics::brent_root(f, 0.0, hi, 0.0);
  // One Newton polish; U0' is the derivative of the excess energy.
  const double slope = dpotential(zeta);
  if (slope > 0.0) {
    const double next = zeta - f(zeta) / slope;
    if (next > 0.0 && std::abs(f(next)) <= std::abs(f(zeta))) zeta = next;
  }
  return zeta;
}

double ConservativeSystem::period_of_amplitude(double zeta) const {
  zeta = std::abs(zeta);
  if (zeta == 0.0) return small_oscillation_period();
  // With z = zeta sin(phi), E - U0(z) = zeta^2 cos^2(phi) S(phi), and the
  // cos(phi) of dz cancels the turning-point singularity exactly.
  const auto integrand = [this, zeta](double phi) {
    const double s = std::sin(phi);
    double sum = 0.0;
    for (std::size_t j = 0; j < masses_.size(); ++j) {
      const double b = radii_[j];
      const double big = std::hypot(zeta, b);
      const double small = std::hypot(zeta * s, b);
      sum += masses_[j] / ((big + small) * big * small);
    }
    return 1.0 / std::sqrt(sum);
  };
  return 2.0 * std::numbers::sqrt2 * numerics::integrate_adaptive(integrand, 0.0, pi / 2, 1e-14);
}

double ConservativeSystem::period_function(double energy) const {
  return period_of_amplitude(amplitude_of_energy(energy));
}

EnergyLevel ConservativeSystem::level(double energy) const {
  EnergyLevel lv;
  lv.energy = energy;
  lv.amplitude = amplitude_of_energy(energy);
  lv.period = period_of_amplitude(lv.amplitude);
  return lv;
}

double ConservativeSystem::period_by_integration(double energy, const ode::Options& options) const {
  using State = std::array<double, 2>;
  State y{amplitude_of_energy(energy), 0.0};
  const auto rhs = [this](double, const State& s, State& ds) {
    ds[0] = s[1];
    ds[1] = -dpotential(s[0]);
  };
  std::vector<double> zeros;
  ode::integrate(rhs, 0.0, y, std::numeric_limits<double>::max(), options, std::span<const double>{},
                 [&zeros](const ode::Step<State>& step) {
                   if ((step.y0[0] > 0.0) != (step.y1[0] > 0.0) || step.y1[0] == 0.0) {
                     zeros.push_back(numerics::brent_root(
                         [&step](double t) { return step.eval(0, t); }, step.t0, step.t1, 0.0));
                   }
                   return zeros.size() < 2;
                 });
  return 2.0 * (zeros[1] - zeros[0]);
}

FieldSample ConservativeSystem::evaluate(double, double z, double) const {
  FieldSample f;
  const double z2 = z * z;
  for (std::size_t j = 0; j < masses_.size(); ++j) {
    const double s2 = radii_[j] * radii_[j] + z2;
    const double inv3 = 1.0 / (s2 * std::sqrt(s2));
    f.acceleration -= masses_[j] * z * inv3;
    f.stiffness -= masses_[j] * inv3 - 3.0 * masses_[j] * z2 * inv3 / s2;
  }
  return f;
}

// ---------------------------------------------------------------------------

SeedSolution solve_seed(const ConservativeSystem& system, int p, int q, const SeedOptions& options) {
  if (p < 1 || q < 1) throw Error(ErrorCode::kInvalidArgument, "p and q must be positive");
  const double target = 2.0 * pi * q / p;
  if (target <= system.small_oscillation_period()) {
    std::ostringstream msg;
    msg << "p > sqrt(beta)*q (p = " << p << ", q = " << q << ", sqrt(beta) = " << std::sqrt(system.beta())
        << ")";
    throw Error(ErrorCode::kNoSeed, msg.str());
  }
  if (p % 2 == 0 && !options.relaxed_symmetry) {
    throw Error(ErrorCode::kAntiperiodicityUnattainable,
                "even p cannot be anti-periodic with anti-period pi q; enable relaxed symmetry");
  }

  const double e_min = system.min_energy();
  const double e_lo = e_min + 1e-10 * std::abs(e_min);
  if (system.period_function(e_lo) >= target) {
    throw Error(ErrorCode::kBracketFailure, "target period too close to the small-oscillation limit");
  }
  double e_hi = 0.5 * e_min;
  int grow = 0;
  while (system.period_function(e_hi) <= target) {
    e_hi *= 0.5;
    if (++grow > 1000 || e_hi == 0.0) {
      throw Error(ErrorCode::kBracketFailure, "period function never exceeds the target");
    }
  }
  const double energy = numerics::brent_root(
      [&system, target](double e) { return system.period_function(e) - target; }, e_lo, e_hi, 0.0);

  SeedSolution seed;
  seed.p = p;
  seed.q = q;
  seed.relaxed = p % 2 == 0;
  seed.level = system.level(energy);

  ShotOptions shot = options.shot;
  shot.mode = seed.relaxed ? ShootingMode::kRelaxedEven : ShootingMode::kAntiPeriodic;
  shot.record_profile = false;
  seed.profile = integrate_full(system, seed.level.amplitude, 0.0, q, shot);
  seed.zero_count = seed.profile.zero_count;

  const double e0 = system.potential(seed.level.amplitude);
  for (std::size_t k = 0; k < seed.profile.size(); ++k) {
    const double e = 0.5 * seed.profile.zdot[k] * seed.profile.zdot[k] + system.potential(seed.profile.z[k]);
    seed.energy_drift = std::max(seed.energy_drift, std::abs(e - e0));
  }

  const ShotResult s = shoot(system, seed.level.amplitude, 0.0, q, shot);
  seed.window_residual = s.residual;
  seed.derivative_wrt_amplitude = s.derivative_wrt_amplitude;

  const auto& r = seed.profile.residuals;
  const bool symmetric =
      r.evenness <= options.symmetry_tolerance &&
      (seed.relaxed || (r.antiperiodicity <= options.symmetry_tolerance &&
                        r.midpoint_zero <= options.symmetry_tolerance));
  if (seed.zero_count != 2 * p || !symmetric) {
    std::ostringstream msg;
    msg << "seed (" << p << ", " << q << ") has " << seed.zero_count << " zeros, evenness "
        << r.evenness << ", anti-periodicity " << r.antiperiodicity << ", midpoint " << r.midpoint_zero;
    throw Error(ErrorCode::kSeedInvalid, msg.str());
  }
  return seed;
}

VariationalSolution variational_solution(const ConservativeSystem& system, const SeedSolution& seed,
                                         const ShotOptions& options) {
  ShotOptions opts = options;
  opts.record_profile = true;
  opts.mode = seed.relaxed ? ShootingMode::kRelaxedEven : ShootingMode::kAntiPeriodic;
  const ShotResult s = shoot(system, seed.level.amplitude, 0.0, seed.q, opts);
  VariationalSolution out;
  out.t = s.quarter_profile.t;
  out.y = s.variation;
  out.derivative = s.derivative_wrt_amplitude;
  return out;
}

}  // namespace sitnikov
