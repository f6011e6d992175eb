#pragma once

#include <cmath>

namespace shl {

/// Two-piece weight phi_sigma(x, t): (sqrt(t)/|x|)^sigma inside the
/// parabolic ball |x| <= sqrt(t), 1 outside.
inline double phi(double radius, double t, double sigma) {
  const double root_t = std::sqrt(t);
  if (radius >= root_t) return 1.0;
  return std::pow(root_t / radius, sigma);
}

}  // namespace shl
