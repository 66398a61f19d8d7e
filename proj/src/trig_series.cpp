#include "sitnikov/trig_series.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sitnikov/error.hpp"

namespace sitnikov {

TrigSeries TrigSeries::fit(std::span<const double> samples, double period, double truncation) {
  const std::size_t n = samples.size();
  if (n < 3) throw Error(ErrorCode::kInvalidArgument, "TrigSeries::fit needs at least 3 samples");
  if (!(period > 0.0)) throw Error(ErrorCode::kInvalidArgument, "TrigSeries period must be positive");

  std::vector<double> cos_table(n), sin_table(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double ang = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
    cos_table[k] = std::cos(ang);
    sin_table[k] = std::sin(ang);
  }

  TrigSeries out;
  out.period_ = period;
  double fmax = 0.0;
  double sum = 0.0;
  for (double v : samples) {
    sum += v;
    fmax = std::max(fmax, std::abs(v));
  }
  out.mean_ = sum / static_cast<double>(n);

  const std::size_t kmax = (n - 1) / 2;
  std::vector<double> a(kmax), b(kmax);
  for (std::size_t k = 1; k <= kmax; ++k) {
    double ca = 0.0, sb = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t idx = (j * k) % n;
      ca += samples[j] * cos_table[idx];
      sb += samples[j] * sin_table[idx];
    }
    a[k - 1] = 2.0 * ca / static_cast<double>(n);
    b[k - 1] = 2.0 * sb / static_cast<double>(n);
  }
  // Nyquist term of an even-length grid: a cosine that cannot be told apart
  // from its alias, split evenly as in standard trigonometric interpolation.
  if (n % 2 == 0) {
    double alt = 0.0;
    for (std::size_t j = 0; j < n; ++j) alt += (j % 2 == 0 ? 1.0 : -1.0) * samples[j];
    a.push_back(alt / static_cast<double>(n));
    b.push_back(0.0);
  }

  const double threshold = truncation * std::max(fmax, 1e-300);
  std::size_t keep = a.size();
  while (keep > 0 && std::abs(a[keep - 1]) <= threshold && std::abs(b[keep - 1]) <= threshold) --keep;
  a.resize(keep);
  b.resize(keep);
  out.cos_ = std::move(a);
  out.sin_ = std::move(b);
  return out;
}

TrigSeries TrigSeries::constant(double value, double period) {
  TrigSeries out;
  out.period_ = period;
  out.mean_ = value;
  return out;
}

double TrigSeries::operator()(double t) const {
  const double w = 2.0 * std::numbers::pi / period_;
  const double c1 = std::cos(w * t);
  const double s1 = std::sin(w * t);
  double ck = 1.0, sk = 0.0;
  double acc = mean_;
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    const double cn = ck * c1 - sk * s1;
    const double sn = sk * c1 + ck * s1;
    ck = cn;
    sk = sn;
    acc += cos_[k] * ck + sin_[k] * sk;
  }
  return acc;
}

double TrigSeries::derivative(double t) const {
  const double w = 2.0 * std::numbers::pi / period_;
  const double c1 = std::cos(w * t);
  const double s1 = std::sin(w * t);
  double ck = 1.0, sk = 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k < cos_.size(); ++k) {
    const double cn = ck * c1 - sk * s1;
    const double sn = sk * c1 + ck * s1;
    ck = cn;
    sk = sn;
    const double kw = static_cast<double>(k + 1) * w;
    acc += kw * (-cos_[k] * sk + sin_[k] * ck);
  }
  return acc;
}

}  // namespace sitnikov
