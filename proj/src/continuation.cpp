#include "sitnikov/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sitnikov/error.hpp"

namespace sitnikov {

std::string_view to_string(BranchStatus status) noexcept {
  switch (status) {
    case BranchStatus::kReachedLambdaOne: return "ReachedLambdaOne";
    case BranchStatus::kFoldBeyondLimit: return "FoldBeyondLimit";
    case BranchStatus::kTrivialCollapse: return "TrivialCollapse";
    case BranchStatus::kBoundExceeded: return "BoundExceeded";
    case BranchStatus::kStepFailure: return "StepFailure";
  }
  return "Unknown";
}

MonitorVerdict monitor_bound(const BranchPoint& point, double m_user) {
  return point.sup_norm >= m_user ? MonitorVerdict::kBoundExceeded : MonitorVerdict::kOk;
}

MonitorVerdict monitor_trivial(const BranchPoint& point, double epsilon1) {
  return point.sup_norm <= epsilon1 ? MonitorVerdict::kTrivialCollapse : MonitorVerdict::kOk;
}

namespace {

struct Evaluation {
  double r = 0.0;
  double r_zeta = 0.0;
  double r_lambda = 0.0;
};

struct Corrected {
  double lambda = 0.0;
  double zeta = 0.0;
  Evaluation ev;
  int iterations = 0;
};

class Tracker {
 public:
  Tracker(const SatelliteField& field, int q, ShootingMode mode, const ContinuationConfig& config,
          double scale)
      : field_(field), q_(q), config_(config), scale_(scale) {
    shot_ = config.shot;
    shot_.mode = mode;
    shot_.record_profile = false;
  }

  Evaluation evaluate(double zeta, double lambda) const {
    const ShotResult s = shoot(field_, zeta, lambda, q_, shot_);
    return {s.residual, s.derivative_wrt_amplitude, s.derivative_wrt_lambda};
  }

  // Newton in zeta at fixed lambda.
  std::optional<Corrected> correct_natural(double lambda, double zeta) const {
    double prev = std::numeric_limits<double>::infinity();
    const double floor = 1e-13 * scale_;
    for (int it = 0; it <= config_.max_newton_iterations; ++it) {
      Evaluation ev;
      try {
        ev = evaluate(zeta, lambda);
      } catch (const Error&) {
        return std::nullopt;
      }
      if (std::abs(ev.r) <= config_.corrector_tolerance) return Corrected{lambda, zeta, ev, it};
      if (ev.r_zeta == 0.0 || !std::isfinite(ev.r_zeta)) return std::nullopt;
      const double delta = -ev.r / ev.r_zeta;
      if (it >= 1 && std::abs(delta) > 0.5 * std::abs(prev) && std::abs(delta) > floor) return std::nullopt;
      zeta += delta;
      prev = delta;
    }
    return std::nullopt;
  }

  // Newton on (lambda, u = zeta / scale) with the arclength constraint.
  std::optional<Corrected> correct_arclength(double lambda_p, double u_p, double t_l, double t_u) const {
    double lambda = lambda_p, u = u_p;
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it <= config_.max_newton_iterations; ++it) {
      if (lambda < 0.0 || lambda > 1.0) return std::nullopt;
      Evaluation ev;
      try {
        ev = evaluate(scale_ * u, lambda);
      } catch (const Error&) {
        return std::nullopt;
      }
      const double f1 = ev.r;
      const double f2 = t_l * (lambda - lambda_p) + t_u * (u - u_p);
      if (std::abs(f1) <= config_.corrector_tolerance && std::abs(f2) <= 1e-12) {
        return Corrected{lambda, scale_ * u, ev, it};
      }
      const double a = ev.r_lambda, b = scale_ * ev.r_zeta;
      const double det = a * t_u - b * t_l;
      if (det == 0.0 || !std::isfinite(det)) return std::nullopt;
      const double dl = (-f1 * t_u + b * f2) / det;
      const double du = (-a * f2 + t_l * f1) / det;
      const double size = std::hypot(dl, du);
      if (it >= 1 && size > 0.5 * prev && size > 1e-13) return std::nullopt;
      lambda += dl;
      u += du;
      prev = size;
    }
    return std::nullopt;
  }

  // Profile-based diagnostics of an accepted root.
  struct Diagnostics {
    BranchPoint point;
    FullProfile profile;
    bool degenerate = false;
    bool count_mismatch = false;
  };

  Diagnostics diagnose(const Corrected& c) const {
    Diagnostics d;
    d.point.lambda = c.lambda;
    d.point.zeta = c.zeta;
    d.point.residual = c.ev.r;
    d.point.dR_dzeta = c.ev.r_zeta;
    d.point.dR_dlambda = c.ev.r_lambda;
    d.point.newton_iterations = c.iterations;
    ShotOptions opts = shot_;
    opts.record_profile = true;
    const ShotResult s = shoot(field_, c.zeta, c.lambda, q_, opts);
    // Symmetric extension without the zero-count step, so that degenerate
    // profiles still produce a sup-norm for the monitors.
    const auto& w = s.quarter_profile;
    FullProfile full;
    try {
      full = reconstruct_full(w, q_, shot_.mode, config_.reconstruction_tolerance);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::kDegenerateProfile && e.code() != ErrorCode::kCountMismatch) throw;
      d.degenerate = e.code() == ErrorCode::kDegenerateProfile;
      d.count_mismatch = e.code() == ErrorCode::kCountMismatch;
      double sup = 0.0;
      for (double z : w.z) sup = std::max(sup, std::abs(z));
      d.point.sup_norm = sup;
      d.point.zero_count = -1;
      return d;
    }
    const ZeroCount zc = zero_count_details(full);
    d.point.zero_count = full.zero_count;
    d.point.winding_integral = zc.winding_integral;
    d.point.sign_changes = zc.sign_changes;
    d.point.sup_norm = sup_norm(full);
    d.profile = std::move(full);
    return d;
  }

 private:
  const SatelliteField& field_;
  int q_;
  const ContinuationConfig& config_;
  double scale_;
  ShotOptions shot_;
};

void orient(double& t_l, double& t_u, double ref_l, double ref_u) {
  if (t_l * ref_l + t_u * ref_u < 0.0) {
    t_l = -t_l;
    t_u = -t_u;
  }
}

}  // namespace

Branch track_branch(const SatelliteField& field, int p, int q, double zeta0, ShootingMode mode,
                    const ContinuationConfig& config, const std::optional<FieldBounds>& bounds) {
  if (p < 1 || q < 1) throw Error(ErrorCode::kInvalidArgument, "p and q must be positive");
  if (!(zeta0 > 0.0) || !std::isfinite(zeta0)) {
    throw Error(ErrorCode::kSeedInvalid, "seed amplitude must be positive");
  }
  if (!(config.min_step > 0.0) || !(config.initial_step >= config.min_step) ||
      !(config.max_step >= config.initial_step) || !(config.corrector_tolerance > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "inconsistent continuation step configuration");
  }
  const int expected = 2 * p;
  const double scale = zeta0;
  Tracker tracker(field, q, mode, config, scale);

  Branch b;
  b.p = p;
  b.q = q;
  b.mode = mode;
  b.seed_zeta = zeta0;
  b.m_user = config.m_user.value_or(1e3 * zeta0);
  b.epsilon1 = config.epsilon1.value_or(1e-6 * zeta0);

  const auto start = tracker.correct_natural(0.0, zeta0);
  if (!start) throw Error(ErrorCode::kSeedInvalid, "seed does not converge under the corrector at lambda = 0");
  auto first = tracker.diagnose(*start);
  if (first.point.zero_count != expected) {
    std::ostringstream msg;
    msg << "seed has " << first.point.zero_count << " zeros, expected " << expected;
    throw Error(ErrorCode::kSeedInvalid, msg.str());
  }

  const auto finish = [&](BranchStatus status, std::string message) {
    b.status = status;
    b.message = std::move(message);
    if (status == BranchStatus::kTrivialCollapse && bounds) {
      b.contradicts_trivial_exclusion = bounds->excludes(p, q);
    }
    return b;
  };
  const auto run_monitors = [&](const BranchPoint& pt) -> std::optional<BranchStatus> {
    if (monitor_bound(pt, b.m_user) == MonitorVerdict::kBoundExceeded) return BranchStatus::kBoundExceeded;
    if (monitor_trivial(pt, b.epsilon1) == MonitorVerdict::kTrivialCollapse) return BranchStatus::kTrivialCollapse;
    return std::nullopt;
  };

  b.points.push_back(first.point);
  b.final_profile = std::move(first.profile);
  if (const auto st = run_monitors(b.points.back())) return finish(*st, "monitor triggered at the seed");

  // Tangent in scaled coordinates (lambda, u = zeta / scale).
  const auto tangent = [scale](const BranchPoint& pt) {
    double t_l = scale * pt.dR_dzeta, t_u = -pt.dR_dlambda;
    const double n = std::hypot(t_l, t_u);
    return std::pair{t_l / n, t_u / n};
  };
  auto [t_l, t_u] = tangent(b.points.back());
  if (t_l < 0.0) {
    t_l = -t_l;
    t_u = -t_u;
  }

  double step = config.initial_step;
  int successes = 0;
  const auto reject = [&]() {
    step *= 0.5;
    successes = 0;
    ++b.rejected_steps;
    return step < config.min_step;
  };

  while (b.points.size() < config.max_points) {
    const BranchPoint& cur = b.points.back();
    const double u_c = cur.zeta / scale;
    const double slope = t_l == 0.0 ? std::numeric_limits<double>::infinity() : std::abs(t_u / t_l);
    const bool arclength = slope > config.slope_threshold;

    std::optional<Corrected> next;
    if (!arclength) {
      const double dir = t_l > 0.0 ? 1.0 : -1.0;
      double lambda_n = cur.lambda + dir * step / std::sqrt(1.0 + slope * slope);
      if (lambda_n >= 1.0 - 1e-12) lambda_n = 1.0;
      if (lambda_n < 0.0) {
        return finish(BranchStatus::kFoldBeyondLimit, "branch returns below lambda = 0");
      }
      const double u_pred = u_c + (t_u / t_l) * (lambda_n - cur.lambda);
      next = tracker.correct_natural(lambda_n, scale * u_pred);
    } else {
      const double lambda_p = cur.lambda + step * t_l;
      const double u_p = u_c + step * t_u;
      if (lambda_p < 0.0) {
        return finish(BranchStatus::kFoldBeyondLimit, "branch returns below lambda = 0");
      }
      if (lambda_p > 1.0) {
        next = tracker.correct_natural(1.0, scale * (u_c + (t_u / t_l) * (1.0 - cur.lambda)));
      } else {
        next = tracker.correct_arclength(lambda_p, u_p, t_l, t_u);
      }
    }
    if (!next) {
      if (reject()) return finish(BranchStatus::kStepFailure, "corrector failed at the minimum step");
      continue;
    }
    const double distance = std::hypot(next->lambda - cur.lambda, (next->zeta - cur.zeta) / scale);
    if (distance > std::min(1.5 * step, config.max_step)) {
      if (reject()) return finish(BranchStatus::kStepFailure, "corrector jumps at the minimum step");
      continue;
    }

    Tracker::Diagnostics diag;
    try {
      diag = tracker.diagnose(*next);
    } catch (const Error&) {
      if (reject()) return finish(BranchStatus::kStepFailure, "profile reconstruction failed at the minimum step");
      continue;
    }
    diag.point.step_taken = step;
    diag.point.arclength = arclength;
    if (diag.degenerate || monitor_trivial(diag.point, b.epsilon1) == MonitorVerdict::kTrivialCollapse) {
      b.points.push_back(diag.point);
      return finish(BranchStatus::kTrivialCollapse, "profile collapses onto z = 0");
    }
    // A step can jump over z = 0 without sampling it: zeta and -zeta are
    // joined only through the trivial solution.
    if ((next->zeta > 0.0) != (cur.zeta > 0.0)) {
      b.points.push_back(diag.point);
      return finish(BranchStatus::kTrivialCollapse, "branch passes through z = 0");
    }
    if (diag.count_mismatch || diag.point.zero_count != expected) {
      if (reject()) return finish(BranchStatus::kStepFailure, "zero count changes at the minimum step");
      continue;
    }

    auto [n_l, n_u] = tangent(diag.point);
    orient(n_l, n_u, t_l, t_u);
    if ((n_l > 0.0) != (t_l > 0.0)) {
      FoldEvent fold;
      const double w = t_l / (t_l - n_l);
      fold.lambda = cur.lambda + w * (diag.point.lambda - cur.lambda);
      fold.zeta = cur.zeta + w * (diag.point.zeta - cur.zeta);
      fold.after_point = b.points.size() - 1;
      b.folds.push_back(fold);
    }
    t_l = n_l;
    t_u = n_u;
    b.points.push_back(diag.point);
    b.final_profile = std::move(diag.profile);
    if (static_cast<int>(b.folds.size()) > config.max_folds) {
      return finish(BranchStatus::kFoldBeyondLimit, "too many folds");
    }
    if (const auto st = run_monitors(b.points.back())) return finish(*st, "monitor triggered");
    if (b.points.back().lambda == 1.0) return finish(BranchStatus::kReachedLambdaOne, "");

    if (++successes >= config.successes_before_growth) {
      step = std::min(config.max_step, step * config.grow_factor);
      successes = 0;
    }
  }
  return finish(BranchStatus::kStepFailure, "maximum number of points reached");
}

Branch continue_branch(const HomotopyField& field, const SeedSolution& seed,
                       const ContinuationConfig& config) {
  const FieldBounds bounds = field_bounds(field.ensemble());
  Branch b = track_branch(field, seed.p, seed.q, seed.level.amplitude,
                          seed.relaxed ? ShootingMode::kRelaxedEven : ShootingMode::kAntiPeriodic, config,
                          bounds);
  b.seed_energy = seed.level.energy;
  b.seed_period = seed.level.period;
  return b;
}

// ---------------------------------------------------------------------------

DistinctnessReport distinctness_check(const SatelliteField& field, const std::vector<Branch>& branches,
                                      const ContinuationConfig& config, std::size_t grid) {
  if (grid < 2) throw Error(ErrorCode::kInvalidArgument, "distinctness grid needs at least 2 points");
  for (const Branch& b : branches) {
    for (std::size_t i = 0; i < b.points.size(); ++i) {
      if (b.points[i].zero_count != 2 * b.p) {
        std::ostringstream msg;
        msg << "branch (" << b.p << ", " << b.q << ") has " << b.points[i].zero_count << " zeros at lambda = "
            << b.points[i].lambda << ", expected " << 2 * b.p;
        throw Error(ErrorCode::kInvariantViolation, msg.str());
      }
    }
  }

  DistinctnessReport report;
  for (std::size_t i = 0; i < grid; ++i) report.lambdas.push_back(static_cast<double>(i) / (grid - 1));

  // profiles[b][g], empty when the branch does not cover lambda_g
  std::vector<std::vector<std::optional<FullProfile>>> profiles(branches.size());
  for (std::size_t bi = 0; bi < branches.size(); ++bi) {
    const Branch& b = branches[bi];
    Tracker tracker(field, b.q, b.mode, config, b.seed_zeta);
    ShotOptions shot = config.shot;
    shot.mode = b.mode;
    profiles[bi].resize(grid);
    for (std::size_t g = 0; g < grid; ++g) {
      const double lambda = report.lambdas[g];
      std::optional<double> guess;
      for (std::size_t k = 0; k < b.points.size() && !guess; ++k) {
        if (b.points[k].lambda == lambda) guess = b.points[k].zeta;
        if (k + 1 < b.points.size()) {
          const double l0 = b.points[k].lambda, l1 = b.points[k + 1].lambda;
          if ((l0 - lambda) * (l1 - lambda) < 0.0) {
            const double w = (lambda - l0) / (l1 - l0);
            guess = b.points[k].zeta + w * (b.points[k + 1].zeta - b.points[k].zeta);
          }
        }
      }
      if (!guess) continue;
      const auto c = tracker.correct_natural(lambda, *guess);
      if (!c) continue;
      try {
        profiles[bi][g] = shoot_profile(field, c->zeta, lambda, b.q, shot, config.reconstruction_tolerance);
      } catch (const Error&) {
      }
    }
  }

  for (std::size_t i = 0; i < branches.size(); ++i) {
    for (std::size_t j = i + 1; j < branches.size(); ++j) {
      const Branch& a = branches[i];
      const Branch& b = branches[j];
      if (a.q != b.q) continue;
      PairSeparation pair;
      pair.p1 = a.p;
      pair.p2 = b.p;
      pair.q = a.q;
      pair.duplicate_input =
          a.p == b.p && std::abs(a.seed_zeta - b.seed_zeta) <= 1e-12 * std::max(1.0, std::abs(a.seed_zeta));
      pair.min_separation = std::numeric_limits<double>::infinity();
      if (!pair.duplicate_input) {
        for (std::size_t g = 0; g < grid; ++g) {
          const auto& fa = profiles[i][g];
          const auto& fb = profiles[j][g];
          if (!fa || !fb || fa->size() != fb->size()) continue;
          double sep = 0.0;
          for (std::size_t k = 0; k < fa->size(); ++k) sep = std::max(sep, std::abs(fa->z[k] - fb->z[k]));
          const bool both_trivial = sup_norm(*fa) <= a.epsilon1 && sup_norm(*fb) <= b.epsilon1;
          if (sep < pair.min_separation) {
            pair.min_separation = sep;
            pair.lambda_at_min = report.lambdas[g];
          }
          if (sep <= config.corrector_tolerance && !both_trivial) pair.distinct = false;
        }
        report.all_distinct = report.all_distinct && pair.distinct;
      }
      report.pairs.push_back(pair);
    }
  }
  return report;
}

}  // namespace sitnikov
