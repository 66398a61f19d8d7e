#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <vector>

#include "sitnikov/error.hpp"
#include "sitnikov/ode.hpp"
#include "sitnikov/primaries.hpp"

namespace sitnikov {

namespace {

// State layout: x0, y0, x1, y1, ..., then vx0, vy0, ...
using State = std::vector<double>;

Vec2 body_position(const State& s, std::size_t j) { return {s[2 * j], s[2 * j + 1]}; }

Vec2 body_velocity(const State& s, std::size_t n, std::size_t j) {
  return {s[2 * n + 2 * j], s[2 * n + 2 * j + 1]};
}

double min_separation(const State& s, std::size_t n) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      best = std::min(best, std::hypot(s[2 * i] - s[2 * j], s[2 * i + 1] - s[2 * j + 1]));
    }
  }
  return best;
}

}  // namespace

double nbody_energy(std::span<const double> masses, std::span<const Vec2> positions,
                    std::span<const Vec2> velocities) {
  double kinetic = 0.0, potential = 0.0;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    kinetic += 0.5 * masses[i] * (velocities[i].x * velocities[i].x + velocities[i].y * velocities[i].y);
    for (std::size_t j = i + 1; j < masses.size(); ++j) {
      potential -= masses[i] * masses[j] /
                   std::hypot(positions[i].x - positions[j].x, positions[i].y - positions[j].y);
    }
  }
  return kinetic + potential;
}

NBodyResult nbody_integrate(std::span<const double> masses, std::span<const Vec2> positions,
                            std::span<const Vec2> velocities, double horizon,
                            const NBodyOptions& options) {
  const std::size_t n = masses.size();
  if (n < 2 || positions.size() != n || velocities.size() != n) {
    throw Error(ErrorCode::kInvalidArgument, "nbody_integrate needs matching masses/positions/velocities");
  }
  if (!(horizon > 0.0) || options.output_intervals < 1) {
    throw Error(ErrorCode::kInvalidArgument, "nbody_integrate needs a positive horizon and output grid");
  }
  State y(4 * n);
  for (std::size_t j = 0; j < n; ++j) {
    y[2 * j] = positions[j].x;
    y[2 * j + 1] = positions[j].y;
    y[2 * n + 2 * j] = velocities[j].x;
    y[2 * n + 2 * j + 1] = velocities[j].y;
  }
  if (min_separation(y, n) < options.tol_collision) {
    throw Error(ErrorCode::kCollisionDetected, "initial configuration is in collision");
  }

  const auto rhs = [&masses, n](double, const State& s, State& ds) {
    for (std::size_t j = 0; j < 2 * n; ++j) {
      ds[j] = s[2 * n + j];
      ds[2 * n + j] = 0.0;
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        const double dx = s[2 * j] - s[2 * i];
        const double dy = s[2 * j + 1] - s[2 * i + 1];
        const double r2 = dx * dx + dy * dy;
        const double inv3 = 1.0 / (r2 * std::sqrt(r2));
        ds[2 * n + 2 * i] += masses[j] * dx * inv3;
        ds[2 * n + 2 * i + 1] += masses[j] * dy * inv3;
        ds[2 * n + 2 * j] -= masses[i] * dx * inv3;
        ds[2 * n + 2 * j + 1] -= masses[i] * dy * inv3;
      }
    }
  };

  NBodyResult result;
  result.table.masses.assign(masses.begin(), masses.end());
  const std::size_t intervals = options.output_intervals;
  std::vector<double> stops(intervals);
  for (std::size_t k = 1; k <= intervals; ++k) {
    stops[k - 1] = horizon * static_cast<double>(k) / static_cast<double>(intervals);
  }
  stops.back() = horizon;

  double total_mass = 0.0;
  for (double m : masses) total_mass += m;
  const auto momentum = [&](const State& s) {
    Vec2 p;
    for (std::size_t j = 0; j < n; ++j) {
      p.x += masses[j] * s[2 * n + 2 * j];
      p.y += masses[j] * s[2 * n + 2 * j + 1];
    }
    return p;
  };
  const auto center = [&](const State& s) {
    Vec2 c;
    for (std::size_t j = 0; j < n; ++j) {
      c.x += masses[j] * s[2 * j] / total_mass;
      c.y += masses[j] * s[2 * j + 1] / total_mass;
    }
    return c;
  };
  const Vec2 p0 = momentum(y);
  const Vec2 c0 = center(y);

  const auto record = [&](double t, const State& s) {
    result.table.times.push_back(t);
    std::vector<Vec2> pos(n), vel(n);
    for (std::size_t j = 0; j < n; ++j) {
      pos[j] = body_position(s, j);
      vel[j] = body_velocity(s, n, j);
    }
    result.table.positions.push_back(std::move(pos));
    result.velocities.push_back(std::move(vel));
    const Vec2 p = momentum(s);
    const Vec2 c = center(s);
    result.momentum_drift = std::max(result.momentum_drift, std::hypot(p.x - p0.x, p.y - p0.y));
    result.center_of_mass_drift =
        std::max(result.center_of_mass_drift, std::hypot(c.x - c0.x - p0.x * t / total_mass,
                                                         c.y - c0.y - p0.y * t / total_mass));
  };
  record(0.0, y);
  const double energy0 = nbody_energy(masses, result.table.positions.front(), result.velocities.front());

  ode::Options opts;
  opts.rtol = options.rtol;
  opts.atol = options.atol;
  ode::Stats stats;
  try {
    ode::integrate(rhs, 0.0, y, horizon, opts, stops,
                   [&](const ode::Step<State>& step) {
                     if (min_separation(step.y1, n) < options.tol_collision) {
                       std::ostringstream msg;
                       msg << "pairwise distance below " << options.tol_collision << " at t = " << step.t1;
                       throw Error(ErrorCode::kCollisionDetected, msg.str());
                     }
                     if (step.at_stop) record(step.t1, step.y1);
                     return true;
                   },
                   &stats);
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kCollisionDetected) throw;
    if (min_separation(y, n) < 1e3 * options.tol_collision) {
      throw Error(ErrorCode::kCollisionDetected, std::string("near-collision: ") + e.what());
    }
    throw Error(ErrorCode::kToleranceNotMet, e.what());
  }
  result.steps = stats.accepted;
  result.rejected_steps = stats.rejected;

  const auto& first = result.table.positions.front();
  const auto& last = result.table.positions.back();
  for (std::size_t j = 0; j < n; ++j) {
    result.closure_residual =
        std::max(result.closure_residual, std::hypot(last[j].x - first[j].x, last[j].y - first[j].y));
  }
  for (std::size_t k = 0; k < result.table.times.size(); ++k) {
    const double e = nbody_energy(masses, result.table.positions[k], result.velocities[k]);
    result.energy_drift = std::max(result.energy_drift, std::abs(e - energy0) / std::abs(energy0));
  }
  return result;
}

InitialConditions polygon_initial_conditions(int n) {
  const double a = polygon_radius(n);
  InitialConditions ic;
  for (int j = 0; j < n; ++j) {
    const double phase = 2.0 * std::numbers::pi * j / n;
    ic.masses.push_back(1.0 / n);
    ic.positions.push_back({a * std::cos(phase), a * std::sin(phase)});
    ic.velocities.push_back({-2.0 * a * std::sin(phase), 2.0 * a * std::cos(phase)});
  }
  return ic;
}

InitialConditions kepler_initial_conditions(double e) {
  if (!(e >= 0.0 && e < 1.0)) throw Error(ErrorCode::kEccentricityOutOfRange, "eccentricity must lie in [0, 1)");
  const double a = std::pow(2.0, -5.0 / 3.0);
  // Relative orbit: semi-major axis 2a, unit total mass, vis-viva at periapsis.
  const double v_rel = std::sqrt((1.0 + e) / (2.0 * a * (1.0 - e)));
  InitialConditions ic;
  ic.masses = {0.5, 0.5};
  ic.positions = {{a * (1.0 - e), 0.0}, {-a * (1.0 - e), 0.0}};
  ic.velocities = {{0.0, 0.5 * v_rel}, {0.0, -0.5 * v_rel}};
  return ic;
}

}  // namespace sitnikov
