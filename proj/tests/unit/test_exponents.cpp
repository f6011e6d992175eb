#include <doctest.h>

#include <cmath>
#include <functional>
#include <limits>

#include "shl/errors.hpp"
#include "shl/exponents.hpp"
#include "support.hpp"

using namespace shl;
using shl::test::rel_close;

namespace {

// Textbook forms, written out independently of the library's factored ones.
double lambda_direct(int n, double p) { return 2.0 * p / (p - 1.0) * (n - 2.0 - 2.0 / (p - 1.0)); }

double sigma_direct(int n, double p) {
  const double lam = lambda_direct(n, p);
  return 0.5 * ((n - 2.0) - std::sqrt((n - 2.0) * (n - 2.0) - 4.0 * lam));
}

double p_jl_direct(int n) { return 1.0 + 4.0 / (n - 4.0 - 2.0 * std::sqrt(n - 1.0)); }

// Golden-section maximization in ln r.
double golden_max(const std::function<double(double)>& f, double lo, double hi) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  for (int it = 0; it < 200; ++it) {
    if (f(c) > f(d)) {
      b = d;
    } else {
      a = c;
    }
    c = b - g * (b - a);
    d = a + g * (b - a);
  }
  return f(0.5 * (a + b));
}

}  // namespace

TEST_CASE("threshold exponents at n = 11") {
  CHECK(fujita_exponent(11) == doctest::Approx(13.0 / 11.0).epsilon(1e-15));
  CHECK(singular_threshold_exponent(11) == doctest::Approx(11.0 / 9.0).epsilon(1e-15));
  CHECK(sobolev_exponent(11) == doctest::Approx(13.0 / 9.0).epsilon(1e-15));
  CHECK(rel_close(joseph_lundgren_exponent(11), p_jl_direct(11), 1e-14));
  CHECK(std::isinf(joseph_lundgren_exponent(10)));
}

TEST_CASE("exact rational values at (11, 7)") {
  const ExponentSet& e = shl::test::exps_11_7();
  CHECK(rel_close(e.lambda, 182.0 / 9.0, 1e-14));
  CHECK(rel_close(e.sigma, 13.0 / 3.0, 1e-14));
  CHECK(rel_close(e.L, std::pow(26.0 / 9.0, 1.0 / 6.0), 1e-14));
  CHECK(rel_close(e.lambda1, 4.0, 1e-14));
  CHECK(rel_close(e.ell_window.lo, 13.0 / 3.0, 1e-14));
  CHECK(rel_close(e.ell_window.hi, 20.0 / 3.0, 1e-14));
  CHECK(rel_close(hardy_gap({11, 7.0}), 1.0 / 36.0, 1e-13));
  CHECK(e.drift() == doctest::Approx(1.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("boundary identities at p_JL") {
  for (int n = 11; n <= 30; ++n) {
    CAPTURE(n);
    const ExponentSet e = compute_exponents({n, joseph_lundgren_exponent(n)});
    CHECK(rel_close(e.lambda, (n - 2.0) * (n - 2.0) / 4.0, 1e-12));
    CHECK(rel_close(e.sigma, 0.5 * (n - 2.0), 1e-12));
    CHECK(std::abs(e.drift()) < 1e-10);
    CHECK(e.p_F < e.p_st);
    CHECK(e.p_st < e.p_S);
    CHECK(e.p_S < e.p_JL);
  }
}

TEST_CASE("sigma agrees with the textbook root away from p_JL") {
  for (int n : {11, 15, 24}) {
    for (double p : {joseph_lundgren_exponent(n) + 0.5, 10.0, 40.0}) {
      CAPTURE(n);
      CAPTURE(p);
      const ExponentSet e = compute_exponents({n, p});
      CHECK(rel_close(e.lambda, lambda_direct(n, p), 1e-13));
      CHECK(rel_close(e.sigma, sigma_direct(n, p), 1e-9));
      CHECK(rel_close(e.sigma * (n - 2.0 - e.sigma), e.lambda, 1e-12));
      CHECK(rel_close(e.sigma, e.m + e.lambda1, 1e-12));
      CHECK(e.sigma > e.m);
      CHECK(2.0 * e.sigma < n);
    }
  }
}

TEST_CASE("admissibility classification") {
  CHECK(hardy_admissible({11, 7.0}) == HardyBranch::JL_branch);
  CHECK(hardy_admissible({11, 2.0}) == HardyBranch::inadmissible);
  const auto [lo, hi] = admissibility_roots(11);
  CHECK(lo == doctest::Approx((7.0 - 2.0 * std::sqrt(10.0)) / 4.0).epsilon(1e-14));
  CHECK(hi == doctest::Approx((7.0 + 2.0 * std::sqrt(10.0)) / 4.0).epsilon(1e-14));
  // Exactly at the lower root: gap zero, still the JL branch.
  const double p_root = 1.0 + 1.0 / lo;
  CHECK(hardy_admissible({11, p_root}) == HardyBranch::JL_branch);
  CHECK(std::abs(hardy_gap({11, p_root})) < 1e-12);
  CHECK_THROWS_AS(compute_exponents({11, 2.0}), AdmissibilityError);
  CHECK_THROWS_AS(compute_exponents({11, 1.1}), DomainError);
  CHECK_THROWS_AS(compute_exponents({2, 3.0}), DomainError);
}

TEST_CASE("envelope exponents at (11, 7, ell = 5)") {
  const auto [argmax, growth] = envelope_scaling_exponents(shl::test::exps_11_7(), 5.0);
  CHECK(rel_close(argmax, -1.0 / 12.0, 1e-12));
  CHECK(rel_close(growth, 1.0 / 36.0, 1e-12));
}

TEST_CASE("envelope closed form against golden section") {
  const ExponentSet& e = shl::test::exps_11_7();
  for (double b_eff : {1e-3, 1e-2, 0.1}) {
    CAPTURE(b_eff);
    const EnvelopeMax m = envelope_max(b_eff, e, 5.0, 1.0);
    auto F = [&](double x) {
      const double r = std::exp(x);
      const double weight = r >= 1.0 ? 1.0 : std::pow(r, -e.sigma);
      return e.L * std::pow(r, -e.m) - b_eff * weight;
    };
    CHECK(rel_close(golden_max(F, -40.0, 10.0), m.max_value, 1e-8));
  }
}

TEST_CASE("envelope approaches v_inf as b_eff vanishes") {
  const ExponentSet& e = shl::test::exps_11_7();
  const EnvelopeMax big = envelope_max(1e-2, e, 5.0, 10.0);
  const EnvelopeMax small = envelope_max(1e-8, e, 5.0, 10.0);
  CHECK(small.argmax_radius < big.argmax_radius);
  CHECK(small.max_value > big.max_value);
}
