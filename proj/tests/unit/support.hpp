#pragma once

#include <algorithm>
#include <cmath>
#include <random>

#include "shl/exponents.hpp"

namespace shl::test {

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

inline const ExponentSet& exps_11_7() {
  static const ExponentSet e = compute_exponents({11, 7.0});
  return e;
}

/// Fixed-seed engine shared by the randomized checks.
inline std::mt19937_64 rng(unsigned long long salt) { return std::mt19937_64(0x5eed0000ULL + salt); }

}  // namespace shl::test
