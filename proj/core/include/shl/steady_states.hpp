#pragma once

#include <span>
#include <vector>

// pchip.hpp in Boost 1.74 uses isnan unqualified; it must be declared first.
#include <boost/math/special_functions/fpclassify.hpp>
#include <boost/math/interpolators/pchip.hpp>

#include "shl/exponents.hpp"

namespace shl {

/// Tabulated radial profile with monotone-cubic (PCHIP) interpolation.
/// Immutable after construction.
class RadialProfile {
 public:
  RadialProfile(ProblemParams params, std::vector<double> radii, std::vector<double> values,
                double center_value);

  [[nodiscard]] const ProblemParams& params() const { return params_; }
  [[nodiscard]] std::span<const double> radii() const { return radii_; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] double r_min() const { return radii_.front(); }
  [[nodiscard]] double r_max() const { return radii_.back(); }
  [[nodiscard]] double center_value() const { return center_value_; }

  /// Profile value at r. Below r_min the two-term series about the center
  /// is used; above r_max throws RangeError.
  [[nodiscard]] double operator()(double r) const;

 private:
  ProblemParams params_;
  std::vector<double> radii_;
  std::vector<double> values_;
  double center_value_;
  boost::math::interpolators::pchip<std::vector<double>> interp_;
};

/// L r^{-2/(p-1)}. Throws DomainError for r <= 0 or when v_inf does not exist.
double v_infinity(double r, const ProblemParams& params);

/// Radial steady state with psi(0) = center_value, integrated with an
/// adaptive Dormand-Prince 4(5) scheme from the series start at r0 = 1e-3.
/// Throws BlowdownError if the profile reaches zero.
RadialProfile integrate_steady_state(const ProblemParams& params, double center_value,
                                     double r_max, double tol);

/// psi_1: the steady state with psi_1(0) = 1. Requires p >= p_S, r_max >= 10,
/// tol in (0, 1e-4].
RadialProfile integrate_psi1(const ProblemParams& params, double r_max, double tol);

/// k psi_1(k^{(p-1)/2} r). Throws RangeError if the scaled radius exceeds
/// the tabulated range.
double psi_k(const RadialProfile& psi1, double k, double r);

/// Radii in [r_min, r_max] where psi - v_inf changes sign, each refined by
/// bisection to 1e-8 in r.
std::vector<double> find_intersections(const RadialProfile& profile, const ProblemParams& params);

enum class SteadyOrdering { below, intersects };

struct SteadyStateSummary {
  SteadyOrdering ordering = SteadyOrdering::below;
  bool strictly_decreasing = true;
  bool positive = true;
  std::vector<double> intersections;
  double max_ratio_to_v_inf = 0.0;  ///< max over nodes of psi / v_inf
};

SteadyStateSummary summarize_steady_state(const RadialProfile& profile,
                                          const ProblemParams& params);

}  // namespace shl
