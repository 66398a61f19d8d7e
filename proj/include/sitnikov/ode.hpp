#pragma once

// Dormand-Prince 5(4) integrator with the Hairer-Wanner continuous
// extension (4th order dense output). Works for any State that behaves like
// a fixed-length container of doubles (std::array or std::vector).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>

#include "sitnikov/error.hpp"

namespace sitnikov::ode {

struct Options {
  double rtol = 1e-12;
  double atol = 1e-12;
  double initial_step = 0.0;  // 0 selects the step automatically
  double max_step = 0.0;      // 0 means unbounded
  std::size_t max_steps = 10'000'000;
};

struct Stats {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
  std::size_t evaluations = 0;
};

/// One accepted step together with its continuous extension.
template <class State>
struct Step {
  double t0 = 0.0;
  double t1 = 0.0;
  State y0;
  State y1;
  State f1;  // right-hand side at (t1, y1)
  State r3, r4, r5;
  bool at_stop = false;
  std::size_t stop_index = 0;

  /// Dense output for component i at t in [t0, t1].
  double eval(std::size_t i, double t) const {
    const double h = t1 - t0;
    const double theta = (t - t0) / h;
    const double theta1 = 1.0 - theta;
    const double diff = y1[i] - y0[i];
    return y0[i] + theta * (diff + theta1 * (r3[i] + theta * (r4[i] + theta1 * r5[i])));
  }

  State eval(double t) const {
    State out = y0;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = eval(i, t);
    return out;
  }
};

namespace detail {

// Butcher tableau.
inline constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
inline constexpr double a21 = 1.0 / 5.0;
inline constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
inline constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
inline constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                        a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
inline constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                        a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
inline constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                        a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
inline constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                        e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
inline constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                        d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                        d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

template <class State>
double scaled_norm(const State& v, const State& y0, const State& y1, const Options& o) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double sc = o.atol + o.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
    const double r = v[i] / sc;
    acc += r * r;
  }
  return std::sqrt(acc / static_cast<double>(v.size()));
}

}  // namespace detail

/// Integrates y' = rhs(t, y) from t0 to t1 (t1 > t0). Steps are clipped so
/// that every time in `stops` (sorted, inside (t0, t1]) is hit exactly. The
/// observer sees every accepted step and may return false to stop early.
/// On return `y` holds the state at the final time reached, which is
/// returned.
template <class State, class Rhs, class Observer>
double integrate(Rhs&& rhs, double t0, State& y, double t1, const Options& opts,
                 std::span<const double> stops, Observer&& observer, Stats* stats = nullptr) {
  using namespace detail;
  if (!(t1 > t0)) {
    if (t1 == t0) return t0;
    throw Error(ErrorCode::kInvalidArgument, "integrate requires t1 >= t0");
  }
  Stats local;
  Stats& st = stats ? *stats : local;

  State k1 = y, k2 = y, k3 = y, k4 = y, k5 = y, k6 = y, k7 = y, ytmp = y, ynew = y, err = y;
  rhs(t0, y, k1);
  ++st.evaluations;

  const double span_len = t1 - t0;
  double h = opts.initial_step;
  if (h <= 0.0) {
    // Hairer-Wanner starting step heuristic.
    const double dy0 = scaled_norm(y, y, y, opts);
    const double df0 = scaled_norm(k1, y, y, opts);
    double h0 = (dy0 < 1e-5 || df0 < 1e-5) ? 1e-6 : 0.01 * dy0 / df0;
    h0 = std::min(h0, span_len);
    for (std::size_t i = 0; i < y.size(); ++i) ytmp[i] = y[i] + h0 * k1[i];
    rhs(t0 + h0, ytmp, k2);
    ++st.evaluations;
    for (std::size_t i = 0; i < y.size(); ++i) err[i] = k2[i] - k1[i];
    const double d2 = scaled_norm(err, y, y, opts) / h0;
    const double dmax = std::max(df0, d2);
    const double h1 = dmax <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dmax, 0.2);
    h = std::min(100.0 * h0, h1);
  }
  if (opts.max_step > 0.0) h = std::min(h, opts.max_step);

  std::size_t next_stop = 0;
  while (next_stop < stops.size() && stops[next_stop] <= t0) ++next_stop;

  Step<State> step;
  step.y0 = y;
  step.y1 = y;
  step.f1 = y;
  step.r3 = y;
  step.r4 = y;
  step.r5 = y;

  double t = t0;
  const double eps = std::numeric_limits<double>::epsilon();
  bool reject_previous = false;
  while (t < t1) {
    if (st.accepted + st.rejected >= opts.max_steps) {
      throw Error(ErrorCode::kIntegratorFailure, "maximum number of steps exceeded");
    }
    double target = t1;
    bool hits_stop = false;
    if (next_stop < stops.size() && stops[next_stop] <= t1) {
      target = stops[next_stop];
      hits_stop = true;
    }
    bool lands = false;
    const double h_proposed = h;
    if (t + h >= target - 4.0 * eps * std::abs(target)) {
      h = target - t;
      lands = true;
    }
    if (h <= 16.0 * eps * std::max(1.0, std::abs(t))) {
      throw Error(ErrorCode::kIntegratorFailure,
                  "step size underflow at t = " + std::to_string(t));
    }

    const std::size_t n = y.size();
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * a21 * k1[i];
    rhs(t + c2 * h, ytmp, k2);
    for (std::size_t i = 0; i < n; ++i) ytmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    rhs(t + c3 * h, ytmp, k3);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    rhs(t + c4 * h, ytmp, k4);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    rhs(t + c5 * h, ytmp, k5);
    for (std::size_t i = 0; i < n; ++i)
      ytmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    const double tnew = lands ? target : t + h;
    rhs(t + h, ytmp, k6);
    for (std::size_t i = 0; i < n; ++i)
      ynew[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    rhs(tnew, ynew, k7);
    st.evaluations += 6;

    for (std::size_t i = 0; i < n; ++i)
      err[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    const double enorm = scaled_norm(err, y, ynew, opts);
    if (!std::isfinite(enorm)) {
      if (h <= 16.0 * eps * std::max(1.0, std::abs(t)) * 1e3) {
        throw Error(ErrorCode::kNonFiniteState, "non-finite state at t = " + std::to_string(t));
      }
      h *= 0.1;
      ++st.rejected;
      reject_previous = true;
      continue;
    }

    double factor = enorm == 0.0 ? 5.0 : 0.9 * std::pow(enorm, -0.2);
    if (enorm <= 1.0) {
      for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(ynew[i])) {
          throw Error(ErrorCode::kNonFiniteState, "non-finite state at t = " + std::to_string(tnew));
        }
      }
      step.t0 = t;
      step.t1 = tnew;
      for (std::size_t i = 0; i < n; ++i) {
        const double diff = ynew[i] - y[i];
        const double bspl = h * k1[i] - diff;
        step.y0[i] = y[i];
        step.y1[i] = ynew[i];
        step.f1[i] = k7[i];
        step.r3[i] = bspl;
        step.r4[i] = diff - h * k7[i] - bspl;
        step.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
      }
      step.at_stop = lands && hits_stop;
      step.stop_index = next_stop;
      ++st.accepted;
      t = tnew;
      y = ynew;
      k1 = k7;
      if (step.at_stop) ++next_stop;
      const bool keep_going = observer(static_cast<const Step<State>&>(step));
      if (!keep_going) return t;
      factor = std::clamp(factor, 0.2, reject_previous ? 1.0 : 5.0);
      reject_previous = false;
      // A landing step may have been artificially short; resume from the
      // step size that was proposed before clipping.
      h = lands ? std::max(h_proposed, h) : h * factor;
    } else {
      ++st.rejected;
      reject_previous = true;
      h *= std::clamp(factor, 0.1, 1.0);
    }
    if (opts.max_step > 0.0) h = std::min(h, opts.max_step);
  }
  return t;
}

/// Convenience overload without stops or observer.
template <class State, class Rhs>
double integrate(Rhs&& rhs, double t0, State& y, double t1, const Options& opts,
                 Stats* stats = nullptr) {
  return integrate(std::forward<Rhs>(rhs), t0, y, t1, opts, std::span<const double>{},
                   [](const Step<State>&) { return true; }, stats);
}

}  // namespace sitnikov::ode
