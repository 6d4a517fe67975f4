#ifndef WGCHAIN_CURVES_HPP
#define WGCHAIN_CURVES_HPP

// Shape statistics on sampled curves: peak census, level crossings, widths.

#include <Eigen/Core>

#include <cmath>
#include <limits>
#include <vector>

namespace wgchain {

/// Indices i with y[i-1] < y[i] > y[i+1]. Endpoints never count.
template <typename Derived>
std::vector<Eigen::Index> interior_maxima(const Eigen::DenseBase<Derived>& y) {
  std::vector<Eigen::Index> out;
  for (Eigen::Index i = 1; i + 1 < y.size(); ++i) {
    if (y[i] > y[i - 1] && y[i] > y[i + 1]) out.push_back(i);
  }
  return out;
}

/// Number of sign changes of y - level. Samples exactly on the level are
/// skipped, so touching without crossing is not counted.
template <typename Derived>
int count_crossings(const Eigen::DenseBase<Derived>& y, double level) {
  int crossings = 0;
  int last_sign = 0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double d = y[i] - level;
    const int s = (d > 0) - (d < 0);
    if (s == 0) continue;
    if (last_sign != 0 && s != last_sign) ++crossings;
    last_sign = s;
  }
  return crossings;
}

/// Full width at half maximum of the global maximum of y(x), with linear
/// interpolation of the half-level crossings. NaN if the peak does not fall to
/// half height on both sides inside the grid.
template <typename DerivedX, typename DerivedY>
double fwhm(const Eigen::DenseBase<DerivedX>& x, const Eigen::DenseBase<DerivedY>& y) {
  Eigen::Index peak = 0;
  y.maxCoeff(&peak);
  const double half = y[peak] / 2.0;
  const double nan = std::numeric_limits<double>::quiet_NaN();

  Eigen::Index i = peak;
  while (i > 0 && y[i] > half) --i;
  if (y[i] > half) return nan;
  const double left = x[i] + (half - y[i]) * (x[i + 1] - x[i]) / (y[i + 1] - y[i]);

  Eigen::Index k = peak;
  while (k + 1 < y.size() && y[k] > half) ++k;
  if (y[k] > half) return nan;
  const double right = x[k - 1] + (half - y[k - 1]) * (x[k] - x[k - 1]) / (y[k] - y[k - 1]);
  return right - left;
}

/// n evenly spaced points from lo to hi inclusive (n == 1 gives {lo}).
inline std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out;
  if (n <= 0) return out;
  out.reserve(static_cast<std::size_t>(n));
  if (n == 1) {
    out.push_back(lo);
    return out;
  }
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  return out;
}

}  // namespace wgchain

#endif  // WGCHAIN_CURVES_HPP
