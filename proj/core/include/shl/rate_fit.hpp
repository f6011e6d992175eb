#pragma once

#include <cstddef>
#include <vector>

namespace shl {

/// Time series of a monitored scalar; value2 is optional and either empty
/// or the same length as t.
struct Series {
  std::vector<double> t;
  std::vector<double> value;
  std::vector<double> value2;

  void push(double time, double v) {
    t.push_back(time);
    value.push_back(v);
  }
  void push(double time, double v, double v2) {
    push(time, v);
    value2.push_back(v2);
  }
  [[nodiscard]] std::size_t size() const { return t.size(); }
  [[nodiscard]] bool has_second() const { return !value2.empty(); }
  /// Copy with value2 moved into value.
  [[nodiscard]] Series second() const;
};

/// Least-squares line through (ln t, ln value).
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double t_lo = 0.0;
  double t_hi = 0.0;
  double rms_residual = 0.0;  ///< in ln units
  int n_samples = 0;
};

/// Fits the samples with t in [t_lo, t_hi] (bounds inclusive up to 1e-9
/// relative). Throws DegenerateError for fewer than 4 samples or any
/// nonpositive value in the window.
RateFit fit_rate(const Series& series, double t_lo, double t_hi);

}  // namespace shl
