#pragma once

#include <cstddef>
#include <span>

namespace ttsa {

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::size_t n_points = 0;
};

// Least squares of log(value) on log(k) over k in [k_lo, k_hi]. Needs >= 8
// points in the window (InsufficientData) and positive values there
// (NonPositive).
RateFit fit_rate(std::span<const double> ks, std::span<const double> values,
                 double k_lo, double k_hi);

}  // namespace ttsa
