#include "sitnikov/field.hpp"

#include <algorithm>
#include <limits>
#include <cmath>
#include <numbers>
#include <sstream>
#include <variant>

#include "sitnikov/error.hpp"

namespace sitnikov {

HomotopyField::HomotopyField(std::shared_ptr<const PrimaryEnsemble> ensemble)
    : ensemble_(std::move(ensemble)) {
  if (!ensemble_) throw Error(ErrorCode::kInvalidArgument, "HomotopyField needs an ensemble");
  masses_ = ensemble_->masses();
  beta_j_ = ensemble_->constants().beta_j;
  constant_radii_ = std::all_of(ensemble_->orbits().begin(), ensemble_->orbits().end(),
                                [](const MassedOrbit& o) {
                                  return std::holds_alternative<CircularMotion>(o.motion());
                                });
}

namespace {

void check_lambda(double lambda) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    std::ostringstream msg;
    msg << "lambda = " << lambda << " outside [0, 1]";
    throw Error(ErrorCode::kLambdaOutOfRange, msg.str());
  }
}

}  // namespace

double HomotopyField::effective_radius(std::size_t j, double t, double lambda) const {
  check_lambda(lambda);
  if (constant_radii_ || lambda == 0.0) return beta_j_[j];
  const double r = ensemble_->orbits()[j].radius(t);
  if (lambda == 1.0) return r;
  return (1.0 - lambda) * beta_j_[j] + lambda * r;
}

PotentialSample HomotopyField::potential(double t, double z, double lambda) const {
  PotentialSample out;
  const double z2 = z * z;
  for (std::size_t j = 0; j < masses_.size(); ++j) {
    const double rho = effective_radius(j, t, lambda);
    const double s2 = rho * rho + z2;
    const double inv = 1.0 / std::sqrt(s2);
    const double inv3 = inv / s2;
    out.value -= masses_[j] * inv;
    out.dz += masses_[j] * z * inv3;
    out.dzz += masses_[j] * inv3 - 3.0 * masses_[j] * z2 * inv3 / s2;
  }
  return out;
}

double HomotopyField::weight(double t, double lambda) const {
  double f = 1.0;
  for (std::size_t j = 0; j < masses_.size(); ++j) {
    const double rho = effective_radius(j, t, lambda);
    f += masses_[j] / (rho * rho * rho);
  }
  return f;
}

FieldSample HomotopyField::evaluate(double t, double z, double lambda) const {
  check_lambda(lambda);
  FieldSample out;
  const double z2 = z * z;
  for (std::size_t j = 0; j < masses_.size(); ++j) {
    const double r = constant_radii_ ? beta_j_[j] : ensemble_->orbits()[j].radius(t);
    const double rho = (1.0 - lambda) * beta_j_[j] + lambda * r;
    const double s2 = rho * rho + z2;
    const double inv3 = 1.0 / (s2 * std::sqrt(s2));
    const double inv5 = inv3 / s2;
    out.acceleration -= masses_[j] * z * inv3;
    out.stiffness -= masses_[j] * inv3 - 3.0 * masses_[j] * z2 * inv5;
    out.lambda_sensitivity += 3.0 * masses_[j] * z * rho * inv5 * (r - beta_j_[j]);
  }
  return out;
}

bool FieldBounds::excludes(int p, int q) const {
  const double x = static_cast<double>(p) / q;
  return x * x < m || x * x > M;
}

FieldBounds field_bounds(const PrimaryEnsemble& ensemble, std::size_t t_samples,
                         std::size_t lambda_samples) {
  if (t_samples < 2 || lambda_samples < 2) {
    throw Error(ErrorCode::kInvalidArgument, "field_bounds needs at least 2 samples per axis");
  }
  FieldBounds out;
  out.m = ensemble.constants().beta + 1.0;
  out.M = ensemble.constants().alpha + 1.0;
  out.t_samples = t_samples;
  out.lambda_samples = lambda_samples;

  // The field only reads the ensemble; a non-owning handle avoids a copy.
  const HomotopyField field(std::shared_ptr<const PrimaryEnsemble>(&ensemble, [](const PrimaryEnsemble*) {}));
  out.scan_m = std::numeric_limits<double>::infinity();
  out.scan_M = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < lambda_samples; ++i) {
    const double lambda = static_cast<double>(i) / static_cast<double>(lambda_samples - 1);
    for (std::size_t k = 0; k < t_samples; ++k) {
      const double t = std::numbers::pi * static_cast<double>(k) / static_cast<double>(t_samples);
      const double f = field.weight(t, lambda);
      out.scan_m = std::min(out.scan_m, f);
      out.scan_M = std::max(out.scan_M, f);
    }
  }

  constexpr double kSlack = 1e-8;
  const double scale = std::max(1.0, out.M);
  if (out.scan_m < out.m - kSlack * scale || out.scan_M > out.M + kSlack * scale ||
      std::abs(out.scan_m - out.m) > kSlack * scale) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "weight scan [" << out.scan_m << ", " << out.scan_M << "] inconsistent with analytic ["
        << out.m << ", " << out.M << "]";
    throw Error(ErrorCode::kInvariantViolation, msg.str());
  }
  return out;
}

}  // namespace sitnikov
