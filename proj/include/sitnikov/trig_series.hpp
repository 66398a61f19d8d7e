#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace sitnikov {

/// Truncated real Fourier series
///   f(t) = a_0 + sum_k a_k cos(k w t) + b_k sin(k w t),  w = 2 pi / period,
/// fitted by trigonometric interpolation of uniform samples.
class TrigSeries {
 public:
  TrigSeries() = default;

  /// `samples` are f(k * period / N) for k = 0..N-1 (endpoint excluded).
  /// Harmonics whose amplitude falls below `truncation * max|f|` beyond the
  /// last significant one are dropped.
  static TrigSeries fit(std::span<const double> samples, double period, double truncation = 1e-15);

  static TrigSeries constant(double value, double period);

  double operator()(double t) const;
  double derivative(double t) const;

  double period() const { return period_; }
  std::size_t harmonics() const { return cos_.size(); }
  double mean() const { return mean_; }

 private:
  double period_ = 1.0;
  double mean_ = 0.0;
  std::vector<double> cos_;
  std::vector<double> sin_;
};

}  // namespace sitnikov
