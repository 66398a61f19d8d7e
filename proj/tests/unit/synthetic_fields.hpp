#pragma once

// Test-only autonomous fields z'' = -w(lambda)^2 g(z) with
// g(z) = z - z^3 + z^5 / 2. The period of z'' = -g(z) rises from 2 pi to a
// maximum near amplitude 1.088 and then decays, so the root curve of the
// quarter-window residual folds in lambda.

#include "sitnikov/field.hpp"

namespace sitnikov::testing {

class FoldingField final : public SatelliteField {
 public:
  FoldingField(double w0, double slope) : w0_(w0), slope_(slope) {}

  double frequency(double lambda) const { return w0_ + slope_ * lambda; }

  FieldSample evaluate(double, double z, double lambda) const override {
    const double w = frequency(lambda);
    const double z2 = z * z;
    const double g = z - z * z2 + 0.5 * z * z2 * z2;
    const double dg = 1.0 - 3.0 * z2 + 2.5 * z2 * z2;
    return {-w * w * g, -w * w * dg, -2.0 * w * slope_ * g};
  }

 private:
  double w0_;
  double slope_;
};

}  // namespace sitnikov::testing
