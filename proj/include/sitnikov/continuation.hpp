#pragma once

// Tracking the root curve R(zeta, lambda) = 0 from lambda = 0 to lambda = 1.

#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sitnikov/conservative.hpp"
#include "sitnikov/field.hpp"
#include "sitnikov/shooting.hpp"

namespace sitnikov {

enum class BranchStatus {
  kReachedLambdaOne,
  kFoldBeyondLimit,
  kTrivialCollapse,
  kBoundExceeded,
  kStepFailure,
};

std::string_view to_string(BranchStatus status) noexcept;

struct ContinuationConfig {
  double initial_step = 0.01;
  double max_step = 0.05;
  double min_step = 1e-6;
  double grow_factor = 1.3;
  int successes_before_growth = 2;
  double corrector_tolerance = 1e-10;
  int max_newton_iterations = 12;
  /// Switch to pseudo-arclength when |d(zeta/zeta0)/d lambda| exceeds this.
  double slope_threshold = 1.0;
  std::optional<double> m_user;    // default 1e3 * zeta0
  std::optional<double> epsilon1;  // default 1e-6 * zeta0
  int max_folds = 4;
  std::size_t max_points = 100000;
  double reconstruction_tolerance = 1e-8;
  ShotOptions shot{};
};

struct BranchPoint {
  double lambda = 0.0;
  double zeta = 0.0;
  double residual = 0.0;
  double dR_dzeta = 0.0;
  double dR_dlambda = 0.0;
  int zero_count = 0;
  double winding_integral = 0.0;
  int sign_changes = 0;
  double sup_norm = 0.0;
  double step_taken = 0.0;
  int newton_iterations = 0;
  bool arclength = false;
};

struct FoldEvent {
  double lambda = 0.0;  // interpolated turning point
  double zeta = 0.0;
  std::size_t after_point = 0;
};

struct Branch {
  int p = 0;
  int q = 0;
  ShootingMode mode = ShootingMode::kAntiPeriodic;
  double seed_zeta = 0.0;
  double seed_energy = 0.0;
  double seed_period = 0.0;
  double m_user = 0.0;
  double epsilon1 = 0.0;
  std::vector<BranchPoint> points;
  BranchStatus status = BranchStatus::kStepFailure;
  std::vector<FoldEvent> folds;
  bool contradicts_trivial_exclusion = false;
  std::string message;
  std::size_t rejected_steps = 0;
  FullProfile final_profile;
};

enum class MonitorVerdict { kOk, kBoundExceeded, kTrivialCollapse };

MonitorVerdict monitor_bound(const BranchPoint& point, double m_user);
MonitorVerdict monitor_trivial(const BranchPoint& point, double epsilon1);

/// General tracker on any field. `bounds`, when given, decides whether a
/// trivial collapse contradicts the exclusion (p/q)^2 outside [m, M].
Branch track_branch(const SatelliteField& field, int p, int q, double zeta0, ShootingMode mode,
                    const ContinuationConfig& config = {},
                    const std::optional<FieldBounds>& bounds = std::nullopt);

/// Continues a conservative seed along the homotopy of its ensemble.
Branch continue_branch(const HomotopyField& field, const SeedSolution& seed,
                       const ContinuationConfig& config = {});

struct PairSeparation {
  int p1 = 0;
  int p2 = 0;
  int q = 0;
  double min_separation = 0.0;  // sup-norm distance, minimized over the grid
  double lambda_at_min = 0.0;
  bool duplicate_input = false;
  bool distinct = true;
};

struct DistinctnessReport {
  std::vector<double> lambdas;
  std::vector<PairSeparation> pairs;
  bool all_distinct = true;
};

/// Compares branches on a common lambda grid. Throws Error(kInvariantViolation)
/// if any branch changes its zero count.
DistinctnessReport distinctness_check(const SatelliteField& field, const std::vector<Branch>& branches,
                                      const ContinuationConfig& config = {}, std::size_t grid = 11);

}  // namespace sitnikov
