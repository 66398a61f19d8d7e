#include "sitnikov/spectral.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <sstream>

#include "sitnikov/error.hpp"
#include "sitnikov/numerics.hpp"

namespace sitnikov {

using std::numbers::pi;

namespace {

double checked_weight(const Weight& weight, double t) {
  const double f = weight(t);
  if (!(f > 0.0) || !std::isfinite(f)) {
    std::ostringstream msg;
    msg << "F(" << t << ") = " << f;
    throw Error(ErrorCode::kWeightNotPositive, msg.str());
  }
  return f;
}

// Prüfer angle with z = r sin(theta), z' = r cos(theta):
//   theta' = cos^2 theta + (eta F - 1) sin^2 theta,  theta(0) = pi / 2.
double terminal_phase(const Weight& weight, double eta, int q, const ode::Options& opts) {
  using State = std::array<double, 1>;
  State y{pi / 2};
  const auto rhs = [&](double t, const State& s, State& ds) {
    const double c = std::cos(s[0]);
    const double sn = std::sin(s[0]);
    ds[0] = c * c + (eta * checked_weight(weight, t) - 1.0) * sn * sn;
  };
  ode::integrate(rhs, 0.0, y, pi * q, opts);
  return y[0];
}

int eigenfunction_sign_changes(const Weight& weight, double eta, int q, const ode::Options& opts) {
  using State = std::array<double, 2>;
  State y{1.0, 0.0};
  const auto rhs = [&](double t, const State& s, State& ds) {
    ds[0] = s[1];
    ds[1] = (1.0 - eta * checked_weight(weight, t)) * s[0];
  };
  int changes = 0;
  const double end = pi * q;
  ode::integrate(rhs, 0.0, y, end, opts, std::span<const double>{},
                 [&](const ode::Step<State>& step) {
                   // The terminal value is nonzero for an eigenfunction, so a
                   // change in the last step is interior.
                   if ((step.y0[0] > 0.0) != (step.y1[0] > 0.0) && step.y0[0] != 0.0) ++changes;
                   return true;
                 });
  return changes;
}

double solve_index(const Weight& weight, int p, int q, const SpectralOptions& o, const ode::Options& opts) {
  const double target = pi / 2 + pi * p;
  const auto g = [&](double eta) { return terminal_phase(weight, eta, q, opts) - target; };
  // At eta = 0 the phase falls below pi / 2, so 0 is always a lower bracket.
  double lo = 0.0;
  double hi = 1.0;
  while (g(hi) <= 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > o.max_eta) {
      std::ostringstream msg;
      msg << "index " << p << " needs eta > " << o.max_eta;
      throw Error(ErrorCode::kIndexNotBracketed, msg.str());
    }
  }
  return numerics::brent_root(g, lo, hi, o.eta_tolerance * hi);
}

struct IndexResult {
  double eta = 0.0;
  double error = 0.0;
  int zeros = 0;
};

IndexResult solve_full(const Weight& weight, int p, int q, const SpectralOptions& o) {
  IndexResult r;
  r.eta = solve_index(weight, p, q, o, o.integrator);
  if (o.estimate_error) {
    ode::Options loose = o.integrator;
    loose.rtol *= 10.0;
    loose.atol *= 10.0;
    r.error = std::max(std::abs(r.eta - solve_index(weight, p, q, o, loose)),
                       std::numeric_limits<double>::epsilon() * r.eta);
  }
  r.zeros = eigenfunction_sign_changes(weight, r.eta, q, o.integrator);
  return r;
}

}  // namespace

int default_p_max(const FieldBounds& bounds, int q) {
  return static_cast<int>(std::ceil(std::sqrt(bounds.M))) * q + 2;
}

SpectralReport sturm_eigenvalues(const Weight& weight, double lambda, int p_max, int q,
                                 const SpectralOptions& options, const std::optional<FieldBounds>& bounds) {
  if (q < 1 || p_max < 0) throw Error(ErrorCode::kInvalidArgument, "need q >= 1 and p_max >= 0");
  const auto count = static_cast<std::size_t>(p_max) + 1;
  std::vector<IndexResult> results(count);
  const int threads = std::max(1, options.threads);
  if (threads == 1) {
    for (std::size_t p = 0; p < count; ++p) results[p] = solve_full(weight, static_cast<int>(p), q, options);
  } else {
    std::vector<std::future<void>> jobs;
    for (int w = 0; w < threads; ++w) {
      jobs.push_back(std::async(std::launch::async, [&, w] {
        for (std::size_t p = static_cast<std::size_t>(w); p < count; p += static_cast<std::size_t>(threads)) {
          results[p] = solve_full(weight, static_cast<int>(p), q, options);
        }
      }));
    }
    for (auto& j : jobs) j.get();
  }

  SpectralReport rep;
  rep.lambda = lambda;
  rep.q = q;
  rep.p_max = p_max;
  for (std::size_t p = 0; p < count; ++p) {
    const auto& r = results[p];
    rep.etas.push_back(r.eta);
    rep.mus.push_back(1.0 / r.eta);
    rep.error_estimates.push_back(r.error);
    rep.interior_zeros.push_back(r.zeros);
    const double margin = 1e-9 + 10.0 * r.error / r.eta;
    rep.verdicts.push_back(std::abs(1.0 / r.eta - 1.0) > margin);
    if (bounds) {
      const double s = 1.0 + static_cast<double>(p * p) / static_cast<double>(q * q);
      rep.bounds_lo.push_back(s / bounds->M);
      rep.bounds_hi.push_back(s / bounds->m);
    }
  }
  return rep;
}

SpectralReport sturm_eigenvalues(const HomotopyField& field, double lambda, int p_max, int q,
                                 const SpectralOptions& options, const std::optional<FieldBounds>& bounds) {
  const FieldBounds b = bounds ? *bounds : field_bounds(field.ensemble());
  if (p_max < 0) p_max = default_p_max(b, q);
  // Validates lambda before the threads start.
  (void)field.weight(0.0, lambda);
  return sturm_eigenvalues([&field, lambda](double t) { return field.weight(t, lambda); }, lambda, p_max,
                           q, options, b);
}

std::vector<IndexVerdict> verify_comparison_bounds(const SpectralReport& report, const FieldBounds& bounds) {
  std::vector<IndexVerdict> out;
  const double q2 = static_cast<double>(report.q) * report.q;
  for (std::size_t k = 0; k < report.etas.size(); ++k) {
    IndexVerdict v;
    v.p = static_cast<int>(k);
    v.eta = report.etas[k];
    v.mu = 1.0 / v.eta;
    const double s = static_cast<double>(k * k) / q2;
    v.lo = (1.0 + s) / bounds.M;
    v.hi = (1.0 + s) / bounds.m;
    const double err = report.error_estimates.empty() ? 0.0 : report.error_estimates[k];
    const double slack = 1e-9 * v.eta + 10.0 * err;
    v.within_bounds = v.eta >= v.lo - slack && v.eta <= v.hi + slack;
    v.excluded = bounds.excludes(v.p, report.q);
    v.forced_nondegenerate = s < bounds.m - 1.0 || s > bounds.M - 1.0;
    v.mu_not_one = std::abs(v.mu - 1.0) > 1e-9 + 10.0 * err / v.eta;
    v.comparison_gap = v.excluded && !v.forced_nondegenerate;
    v.two_sided_display_holds =
        v.mu >= bounds.m / (bounds.m + 1.0) && v.mu <= bounds.M / (bounds.M + 1.0);
    if (!v.within_bounds || (v.forced_nondegenerate && !v.mu_not_one)) {
      std::ostringstream msg;
      msg.precision(17);
      msg << "index " << v.p << ": eta = " << v.eta << " outside [" << v.lo << ", " << v.hi << "]";
      if (v.within_bounds) msg << " or mu = 1";
      throw Error(ErrorCode::kBoundViolated, msg.str());
    }
    out.push_back(v);
  }
  return out;
}

std::vector<double> finite_difference_eigenvalues(const Weight& weight, int q, std::size_t cells,
                                                  std::size_t count) {
  if (cells < 4 || count == 0 || count > cells) {
    throw Error(ErrorCode::kInvalidArgument, "finite-difference grid too small");
  }
  const auto n = static_cast<Eigen::Index>(cells);
  const double h = pi * q / static_cast<double>(cells);
  // A z = eta W z with W = diag(F); symmetrized as W^-1/2 A W^-1/2.
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  Eigen::VectorXd w_inv_sqrt(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    w_inv_sqrt[i] = 1.0 / std::sqrt(checked_weight(weight, (static_cast<double>(i) + 0.5) * h));
    double diag = 1.0;
    if (i > 0) {
      a(i, i - 1) = -1.0 / (h * h);
      diag += 1.0 / (h * h);
    }
    if (i + 1 < n) {
      a(i, i + 1) = -1.0 / (h * h);
      diag += 1.0 / (h * h);
    }
    a(i, i) = diag;
  }
  const Eigen::MatrixXd sym = w_inv_sqrt.asDiagonal() * a * w_inv_sqrt.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::kIntegratorFailure, "eigen solver failed");
  std::vector<double> out(solver.eigenvalues().data(), solver.eigenvalues().data() + count);
  return out;
}

}  // namespace sitnikov
