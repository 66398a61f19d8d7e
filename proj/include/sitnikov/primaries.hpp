#pragma once

// Planar primary configurations: analytic providers, trajectory ingestion,
// dihedral symmetry certification and the radial constants alpha/beta.

#include <array>
#include <cmath>
#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "sitnikov/error.hpp"
#include "sitnikov/trig_series.hpp"

namespace sitnikov {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
};

inline double norm(Vec2 v) { return std::hypot(v.x, v.y); }

using Matrix2 = std::array<std::array<double, 2>, 2>;

inline Vec2 apply(const Matrix2& m, Vec2 v) {
  return {m[0][0] * v.x + m[0][1] * v.y, m[1][0] * v.x + m[1][1] * v.y};
}

/// Uniform rotation: q(t) = radius * (cos(w t + phase), sin(w t + phase)).
struct CircularMotion {
  double radius = 1.0;
  double angular_velocity = 2.0;
  double phase = 0.0;
};

/// Keplerian ellipse about the origin (a focus), periapsis at mean anomaly 0.
struct KeplerMotion {
  double semi_major_axis = 1.0;
  double eccentricity = 0.0;
  double mean_motion = 2.0;
  double mean_anomaly_at_epoch = 0.0;
  double periapsis_angle = 0.0;
};

/// Fourier-interpolated tabulated motion (pi-periodic).
struct SampledMotion {
  TrigSeries x;
  TrigSeries y;
  TrigSeries radius;
};

using Motion = std::variant<CircularMotion, KeplerMotion, SampledMotion>;

class MassedOrbit {
 public:
  MassedOrbit(double mass, Motion motion);

  double mass() const { return mass_; }
  const Motion& motion() const { return motion_; }

  Vec2 position(double t) const;
  double radius(double t) const;
  /// Polar angle in (-pi, pi].
  double angle(double t) const;
  std::string_view representation() const;

 private:
  double mass_;
  Motion motion_;
};

/// Permutations are stored 0-based as image lists: zeta[j] is the image of j.
struct SymmetrySpec {
  int d = 2;
  std::vector<std::size_t> zeta1;
  std::vector<std::size_t> zeta2;
  Matrix2 reflection{{{1.0, 0.0}, {0.0, -1.0}}};

  /// Throws Error(kInvalidArgument) unless zeta1^d = id, zeta2^2 = id and
  /// the reflection is an orthogonal involution.
  void validate(std::size_t bodies) const;
};

struct SymmetryCertificate {
  bool passed = false;
  double max_rotation_residual = 0.0;
  double max_reversal_residual = 0.0;
  double max_mass_residual = 0.0;
  double tolerance = 0.0;
  std::size_t grid_size = 0;
};

/// Error(kNotCertified) carrying the failed certificate.
class CertificationFailure : public Error {
 public:
  CertificationFailure(const std::string& message, SymmetryCertificate certificate)
      : Error(ErrorCode::kNotCertified, message), certificate_(certificate) {}

  const SymmetryCertificate& certificate() const noexcept { return certificate_; }

 private:
  SymmetryCertificate certificate_;
};

struct RadialConstants {
  std::vector<double> alpha_j;  // per-body minimum of |q_j(t)|
  std::vector<double> beta_j;   // per-body maximum
  double alpha = 0.0;           // sum m_j / alpha_j^3
  double beta = 0.0;            // sum m_j / beta_j^3
  double alpha_min = 0.0;
};

/// Planar positions of n bodies on a time grid.
struct TrajectoryTable {
  std::vector<double> times;
  std::vector<std::vector<Vec2>> positions;  // positions[k][j] at times[k]
  std::vector<double> masses;

  std::size_t bodies() const { return masses.size(); }
};

inline constexpr double kDefaultCertificationTolerance = 1e-8;
inline constexpr std::size_t kDefaultCertificationGrid = 1024;
inline constexpr std::size_t kDefaultExtremaSamples = 4096;

class PrimaryEnsemble {
 public:
  /// Certifies the orbits against `spec` and computes the radial constants.
  /// Throws Error(kNotCertified) when the certificate fails.
  static PrimaryEnsemble create(std::vector<MassedOrbit> orbits, SymmetrySpec spec,
                                double tolerance, std::string label,
                                std::size_t certification_grid = kDefaultCertificationGrid);

  const std::vector<MassedOrbit>& orbits() const { return orbits_; }
  const SymmetrySpec& symmetry() const { return symmetry_; }
  const SymmetryCertificate& certificate() const { return certificate_; }
  const RadialConstants& constants() const { return constants_; }
  const std::string& label() const { return label_; }
  std::size_t size() const { return orbits_.size(); }
  std::vector<double> masses() const;

 private:
  PrimaryEnsemble() = default;

  std::vector<MassedOrbit> orbits_;
  SymmetrySpec symmetry_;
  SymmetryCertificate certificate_;
  RadialConstants constants_;
  std::string label_;
};

/// Radius of the regular n-gon relative equilibrium with masses 1/n and
/// angular velocity 2.
double polygon_radius(int n);

/// n equal masses 1/n on a uniformly rotating regular n-gon with period pi.
/// `d` must divide n (0 selects d = n).
PrimaryEnsemble build_circular_polygon(int n, int d = 0);

/// Two masses 1/2 on mirror Keplerian ellipses of period pi, periapsis at t = 0.
PrimaryEnsemble build_kepler_pair(double eccentricity);

/// Solves E - e sin E = M by Newton iteration.
double solve_kepler(double mean_anomaly, double eccentricity);

SymmetryCertificate certify_symmetry(std::span<const MassedOrbit> orbits, const SymmetrySpec& spec,
                                     double tolerance,
                                     std::size_t grid = kDefaultCertificationGrid);

/// Dense sampling of |q_j| over one period followed by golden-section refinement.
RadialConstants radial_constants(std::span<const MassedOrbit> orbits,
                                 std::size_t samples = kDefaultExtremaSamples);

struct IngestOptions {
  double tolerance = kDefaultCertificationTolerance;
  double tol_closure = 1e-8;
  double tol_origin = 1e-8;
  double tol_mass = 1e-10;
  double tol_com = 1e-8;
  std::size_t certification_grid = kDefaultCertificationGrid;
};

/// Builds an ensemble from a tabulated pi-periodic solution on a uniform grid
/// over [0, pi] (both endpoints included).
PrimaryEnsemble ingest_trajectory(const TrajectoryTable& table, const SymmetrySpec& spec,
                                  const IngestOptions& options = {}, std::string label = "table");

/// Samples an ensemble on `intervals` + 1 uniform points over [0, pi].
TrajectoryTable sample_ensemble(const PrimaryEnsemble& ensemble, std::size_t intervals);

/// Brute-force search over permutation pairs for n <= 8 with the given d and
/// reflection. Returns the first spec whose certificate passes.
std::optional<SymmetrySpec> search_symmetry(std::span<const MassedOrbit> orbits, int d,
                                            const Matrix2& reflection, double tolerance,
                                            std::size_t grid = 256);

// ---------------------------------------------------------------------------
// Planar n-body integration.

struct NBodyOptions {
  double rtol = 1e-13;
  double atol = 1e-13;
  double tol_collision = 1e-6;
  std::size_t output_intervals = 512;
};

struct NBodyResult {
  TrajectoryTable table;
  std::vector<std::vector<Vec2>> velocities;  // per output time
  double closure_residual = 0.0;              // |Q(horizon) - Q(0)|
  double energy_drift = 0.0;                  // relative
  double momentum_drift = 0.0;
  double center_of_mass_drift = 0.0;
  std::size_t steps = 0;
  std::size_t rejected_steps = 0;
};

double nbody_energy(std::span<const double> masses, std::span<const Vec2> positions,
                    std::span<const Vec2> velocities);

NBodyResult nbody_integrate(std::span<const double> masses, std::span<const Vec2> positions,
                            std::span<const Vec2> velocities, double horizon,
                            const NBodyOptions& options = {});

struct InitialConditions {
  std::vector<double> masses;
  std::vector<Vec2> positions;
  std::vector<Vec2> velocities;
};

/// Initial state of build_circular_polygon(n).
InitialConditions polygon_initial_conditions(int n);

/// Initial state of build_kepler_pair(e), at periapsis.
InitialConditions kepler_initial_conditions(double eccentricity);

}  // namespace sitnikov
