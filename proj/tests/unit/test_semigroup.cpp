#include <doctest.h>

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <numbers>
#include <vector>

#include "shl/errors.hpp"
#include "shl/nonlinear.hpp"
#include "shl/rate_fit.hpp"
#include "shl/semigroup.hpp"
#include "shl/weights.hpp"
#include "support.hpp"

using namespace shl;
using shl::test::rel_close;

namespace {

LogGrid wide_grid(int points = 1024) { return {std::log(1e-5), std::log(200.0), points}; }

// Gamma(n/2) (2/kappa)^nu I_nu(kappa) e^{-kappa}, nu = n/2 - 1.
double bessel_mean(int n, double kappa) {
  const double nu = 0.5 * n - 1.0;
  return boost::math::tgamma(0.5 * n) * std::pow(2.0 / kappa, nu) *
         boost::math::cyl_bessel_i(nu, kappa) * std::exp(-kappa);
}

}  // namespace

TEST_CASE("weight examples") {
  CHECK(phi(1.0, 1.0, 3.0) == 1.0);
  CHECK(phi(0.5, 1.0, 2.0) == doctest::Approx(4.0));
  CHECK(phi(2.0, 1.0, 2.0) == 1.0);
  CHECK(phi(1.0 - 1e-12, 1.0, 4.0) == doctest::Approx(1.0));
  const WeightEvaluator w{13.0 / 3.0};
  for (double r : {1e-3, 0.1, 1.0, 10.0}) CHECK(w(r, 4.0) >= 1.0);
}

TEST_CASE("sphere area") {
  CHECK(sphere_area(2) == doctest::Approx(2.0 * std::numbers::pi));
  CHECK(sphere_area(3) == doctest::Approx(4.0 * std::numbers::pi));
  CHECK(sphere_area(4) == doctest::Approx(2.0 * std::numbers::pi * std::numbers::pi));
}

TEST_CASE("spherical mean against the Bessel closed form") {
  for (int n : {3, 5, 11, 20}) {
    for (double kappa : {1e-3, 0.5, 5.0, 60.0, 600.0}) {
      CAPTURE(n);
      CAPTURE(kappa);
      CHECK(rel_close(spherical_exponential_mean(n, kappa), bessel_mean(n, kappa), 1e-8));
    }
  }
  CHECK(rel_close(spherical_exponential_mean(3, 2.0), (1.0 - std::exp(-4.0)) / 4.0, 1e-10));
  CHECK(spherical_exponential_mean(11, 0.0) == doctest::Approx(1.0));
}

TEST_CASE("radial heat kernel carries unit mass") {
  const int n = 11;
  for (double tau : {0.05, 0.3, 2.0}) {
    CAPTURE(tau);
    const double rho = 1.0;
    const double r_hi = rho + 30.0 * std::sqrt(tau);
    const int steps = 20000;
    const double h = r_hi / steps;
    double mass = 0.0;
    for (int i = 1; i <= steps; ++i) {
      const double r = i * h;
      const double f = radial_gaussian(n, r, rho, tau) * std::pow(r, n - 1);
      mass += (i == steps ? 0.5 : 1.0) * f;
    }
    CHECK(sphere_area(n) * mass * h == doctest::Approx(1.0).epsilon(1e-6));
  }
}

TEST_CASE("annular bump is normalized") {
  const LogGrid g = wide_grid();
  const RadialField b = annular_bump(g, 11, 13.0 / 3.0, 1.0);
  double mass = 0.0;
  int support = 0;
  for (int i = 0; i < g.points; ++i) {
    mass += b.w(i) * std::exp(11.0 * g.s(i)) * g.h();
    support += b.W[i] > 0.0 ? 1 : 0;
  }
  CHECK(sphere_area(11) * mass == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(support <= 5);
  CHECK_THROWS_AS(annular_bump(g, 11, 1.0, 1e4), RangeError);
}

TEST_CASE("weighted norms") {
  const double sigma = 13.0 / 3.0;
  const LogGrid g = wide_grid();
  const double t = 4.0;
  const RadialField ph = RadialField::from_w(g, sigma, 0.0, [&](double r) { return phi(r, t, sigma); });
  CHECK(weighted_norm(ph, 11, {std::numeric_limits<double>::infinity(), t}) == doctest::Approx(1.0));

  const RadialField f = RadialField::from_w(g, sigma, 0.0, [](double r) { return std::exp(-r * r); });
  RadialField f3 = f;
  for (double& w : f3.W) w *= -3.0;
  for (double q : {1.0, 2.0, 3.5}) {
    CAPTURE(q);
    CHECK(weighted_norm(f3, 11, {q, t}) == doctest::Approx(3.0 * weighted_norm(f, 11, {q, t})));
  }
  // q = 2: the weight cancels; compare against the Gaussian moment.
  const double exact = std::sqrt(sphere_area(11) * 0.5 * boost::math::tgamma(5.5) / std::pow(2.0, 5.5));
  CHECK(weighted_norm(f, 11, {2.0, t}) == doctest::Approx(exact).epsilon(1e-8));
  CHECK(weighted_norm(f, 11, {2.0, 0.01}) == doctest::Approx(exact).epsilon(1e-8));

  const RadialField slow = RadialField::from_w(g, sigma, 0.0, [](double r) { return std::pow(r, -4.0); });
  CHECK_THROWS_AS(weighted_norm(slow, 11, {2.0, t}), NonFiniteError);
}

TEST_CASE("short-time semigroup is close to the identity") {
  const ExponentSet& e = shl::test::exps_11_7();
  const LogGrid g = wide_grid(512);
  const RadialOperator op = assemble_operator(g, e);
  const RadialField w0 = RadialField::from_w(g, e.sigma, 0.0, [](double r) { return smooth_bump(r, 1.0, 3.0); });
  Series gaps;
  for (double t : {1e-5, 1e-4, 1e-3, 1e-2}) {
    EvolutionConfig time;
    time.dt0 = t / 100.0;
    time.growth = 1.0;
    const RadialField out = apply_semigroup(w0, op, t, time);
    double d = 0.0;
    for (int i = 0; i < g.points; ++i) d = std::max(d, std::abs(out.W[i] - w0.W[i]));
    gaps.push(t, d);
  }
  CHECK(fit_rate(gaps, 0.0, 1.0).slope == doctest::Approx(1.0).epsilon(0.1));
}

TEST_CASE("linear flow preserves positivity and yields -sigma at the origin") {
  const ExponentSet& e = shl::test::exps_11_7();
  const LogGrid g = wide_grid();
  const RadialOperator op = assemble_operator(g, e);
  const RadialField w0 = sample_initial(InitialDataSpec::annulus(0.1, 1.0, 2.0), e, g);
  const std::vector<double> times{1.0, 10.0, 100.0};
  const auto snaps = semigroup_snapshots(w0, op, times);
  REQUIRE(snaps.size() == 3);
  for (const auto& s : snaps) {
    for (int i = 0; i < s.size(); ++i) CHECK(s.W[i] >= -1e-10 * w0.max_abs());
    CHECK(near_origin_slope(s, s.t) == doctest::Approx(-e.sigma).epsilon(0.05));
  }
}

TEST_CASE("zero data gives zero series") {
  const ExponentSet& e = shl::test::exps_11_7();
  const LogGrid g = wide_grid(256);
  const RadialOperator op = assemble_operator(g, e);
  const RadialField zero{g, std::vector<double>(g.points, 0.0), e.sigma, 0.0};
  const std::vector<double> times{1.0, 10.0};
  for (double v : decay_series_linear(zero, op, times).value) CHECK(v == 0.0);
  for (double v : vanishing_series_linear(zero, op, times).value) CHECK(v == 0.0);
  CHECK_FALSE(smoothing_ratio(zero, op, 1.0, 2.0, 1.0).has_value());
}

TEST_CASE("smoothing ratio with q = r is a norm quotient") {
  const ExponentSet& e = shl::test::exps_11_7();
  const LogGrid g = wide_grid(512);
  const RadialOperator op = assemble_operator(g, e);
  const RadialField w0 = sample_initial(InitialDataSpec::annulus(0.1, 1.0, 2.0), e, g);
  const auto ratio = smoothing_ratio(w0, op, 10.0, 2.0, 2.0);
  REQUIRE(ratio.has_value());
  const double quotient =
      weighted_norm(apply_semigroup(w0, op, 10.0), 11, {2.0, 10.0}) / weighted_norm(w0, 11, {2.0, 10.0});
  CHECK(*ratio == doctest::Approx(quotient).epsilon(1e-12));
  CHECK(*ratio <= 1.0);
}

TEST_CASE("kernel sweep in the free heat limit") {
  ExponentSet free = shl::test::exps_11_7();
  free.sigma = 0.0;
  SolverConfig solver;
  solver.grid = {std::log(1e-4), std::log(200.0), 2048};
  solver.time.dt_max = 1e-4;
  const std::vector<double> times{0.1, 1.0};
  const std::vector<double> cs{1.01};
  const KernelCheckResult res = kernel_bound_check(1.0, times, cs, free, solver);
  // sup of G_t / G_{ct} over the tails is c^{n/2}
  for (double ratio : res.sweeps.front().max_ratio) {
    CHECK(ratio == doctest::Approx(std::pow(1.01, 5.5)).epsilon(0.01));
  }
  REQUIRE(res.best_c.has_value());
}

TEST_CASE("kernel ratio at (11, 7) between t = 1 and t = 100") {
  SolverConfig solver;
  solver.grid = {std::log(1e-6), std::log(200.0), 2048};
  const std::vector<double> times{1.0, 100.0};
  const std::vector<double> cs{2.0};
  const KernelCheckResult res = kernel_bound_check(1.0, times, cs, shl::test::exps_11_7(), solver);
  CHECK(res.sweeps.front().variation <= 3.0);
  REQUIRE(res.best_c.has_value());
  CHECK(*res.best_c == 2.0);
  for (double slope : res.origin_slopes) CHECK(slope == doctest::Approx(-13.0 / 3.0).epsilon(0.05));
}
