#include "ttsa/fit.hpp"

#include <cmath>
#include <sstream>
#include <vector>

#include "ttsa/error.hpp"

namespace ttsa {

RateFit fit_rate(std::span<const double> ks, std::span<const double> values,
                 double k_lo, double k_hi) {
  if (ks.size() != values.size())
    throw Error(ErrorKind::InvalidArgument, "k and value columns differ in length");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (ks[i] < k_lo || ks[i] > k_hi) continue;
    if (!(values[i] > 0.0) || !(ks[i] > 0.0)) {
      std::ostringstream os;
      os << "non-positive value " << values[i] << " at k = " << ks[i];
      throw Error(ErrorKind::NonPositive, os.str());
    }
    lx.push_back(std::log(ks[i]));
    ly.push_back(std::log(values[i]));
  }
  if (lx.size() < 8) {
    std::ostringstream os;
    os << "only " << lx.size() << " points in [" << k_lo << ", " << k_hi
       << "], need 8";
    throw Error(ErrorKind::InsufficientData, os.str());
  }
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i];
    my += ly[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxx += (lx[i] - mx) * (lx[i] - mx);
    sxy += (lx[i] - mx) * (ly[i] - my);
    syy += (ly[i] - my) * (ly[i] - my);
  }
  if (!(sxx > 0.0))
    throw Error(ErrorKind::InsufficientData, "all k in the window are equal");
  RateFit f;
  f.n_points = lx.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    const double e = ly[i] - (f.intercept + f.slope * lx[i]);
    ss_res += e * e;
  }
  f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return f;
}

}  // namespace ttsa
