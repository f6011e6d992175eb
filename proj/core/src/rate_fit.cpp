#include "shl/rate_fit.hpp"

#include <boost/math/statistics/linear_regression.hpp>

#include <cmath>
#include <string>

#include "shl/errors.hpp"

namespace shl {

Series Series::second() const {
  Series out;
  out.t = t;
  out.value = value2;
  return out;
}

RateFit fit_rate(const Series& series, double t_lo, double t_hi) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double t = series.t[i];
    if (t < t_lo * (1.0 - 1e-9) || t > t_hi * (1.0 + 1e-9)) continue;
    const double v = series.value[i];
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw DegenerateError("nonpositive value " + std::to_string(v) + " at t = " +
                            std::to_string(t) + " inside the fit window");
    }
    x.push_back(std::log(t));
    y.push_back(std::log(v));
  }
  if (x.size() < 4) {
    throw DegenerateError("fit window holds " + std::to_string(x.size()) +
                          " samples; at least 4 are required");
  }
  const auto [intercept, slope] = boost::math::statistics::simple_ordinary_least_squares(x, y);

  RateFit fit;
  fit.slope = slope;
  fit.intercept = intercept;
  fit.t_lo = t_lo;
  fit.t_hi = t_hi;
  fit.n_samples = static_cast<int>(x.size());
  double ss = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (intercept + slope * x[i]);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / x.size());
  return fit;
}

}  // namespace shl
