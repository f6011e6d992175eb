#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <vector>

#include "shl/errors.hpp"
#include "shl/nonlinear.hpp"
#include "shl/semigroup.hpp"
#include "shl/steady_states.hpp"
#include "support.hpp"

using namespace shl;
using shl::test::rel_close;
using big = boost::multiprecision::cpp_bin_float_50;

namespace {

double defect_exact(double w, double v, double p) {
  const big W(w), V(v), P(p);
  return static_cast<double>(pow(V - W, P) - pow(V, P) + P * pow(V, P - 1) * W);
}

double slope_exact(double w, double v, double p) {
  const big W(w), V(v), P(p);
  return static_cast<double>(P * pow(V, P - 1) - P * pow(V - W, P - 1));
}

SolverConfig small_solver(double t1) {
  SolverConfig s;
  s.grid = {std::log(1e-4), std::log(300.0), 1024};
  s.time.t1 = t1;
  s.time.snapshot_times = log_spaced_times(1.0, t1, 3);
  return s;
}

}  // namespace

TEST_CASE("defect examples") {
  const ExponentSet& e = shl::test::exps_11_7();
  for (double r : {1e-3, 1.0, 50.0}) {
    const double v = v_infinity(r, e.params);
    CHECK(nonlinear_defect(0.0, r, e) == 0.0);
    CHECK(rel_close(nonlinear_defect(v, r, e), 6.0 * std::pow(v, 7.0), 1e-12));
  }
  CHECK_THROWS_AS(nonlinear_defect(-1e-3, 1.0, e), DomainError);
  CHECK_THROWS_AS(nonlinear_defect(2.0 * e.L, 1.0, e), DomainError);
}

TEST_CASE("defect against 50-digit arithmetic") {
  for (double p : {1.5, 3.0, 7.0, 15.5}) {
    for (double x : {1e-14, 1e-9, 1e-5, 1e-3, 0.05, 0.0999, 0.1, 0.3, 0.9, 0.999999}) {
      CAPTURE(p);
      CAPTURE(x);
      const double v = 1.7;
      double slope = 0.0;
      const double got = convexity_defect(x * v, v, p, &slope);
      CHECK(rel_close(got, defect_exact(x * v, v, p), 1e-11));
      CHECK(rel_close(slope, slope_exact(x * v, v, p), 1e-11));
    }
  }
}

TEST_CASE("data kinds") {
  CHECK(parse_data_kind("power-tail") == DataKind::power_tail);
  CHECK(parse_data_kind("sigma_tail") == DataKind::sigma_tail);
  CHECK(parse_data_kind("psi-k") == DataKind::psi_k_gap);
  CHECK(to_string(DataKind::annulus) == "annulus");
  CHECK_THROWS_AS(parse_data_kind("gauss"), ConfigError);
}

TEST_CASE("initial data profiles") {
  const ExponentSet& e = shl::test::exps_11_7();
  const auto power = InitialDataSpec::power_tail(0.1, 5.0);
  CHECK(power(0.125, e) == doctest::Approx(0.2));
  CHECK(power(1.0, e) == doctest::Approx(0.1));
  CHECK(power(2.0, e) == doctest::Approx(0.1 / 32.0));
  const auto tail = InitialDataSpec::sigma_tail(0.1);
  CHECK(tail(1e-3, e) == doctest::Approx(0.1 * 10.0));
  CHECK(tail(100.0, e) == doctest::Approx(0.1 * std::pow(100.0, -e.sigma) / std::log(std::exp(1.0) + 100.0)));
  CHECK(smooth_bump(1.5, 1.0, 2.0) == doctest::Approx(1.0));
  CHECK(smooth_bump(1.0, 1.0, 2.0) == 0.0);
  CHECK(smooth_bump(2.5, 1.0, 2.0) == 0.0);

  CHECK_THROWS_AS(InitialDataSpec::power_tail(2.0, 5.0).validate(e), DomainError);
  CHECK_THROWS_AS(InitialDataSpec::power_tail(0.1, 0.2).validate(e), DomainError);
  CHECK_THROWS_AS(InitialDataSpec::power_tail(0.1, 7.0).validate(e), DomainError);
  CHECK_THROWS_AS(InitialDataSpec::annulus(0.1, 2.0, 1.0).validate(e), DomainError);
  CHECK_NOTHROW(InitialDataSpec::power_tail(0.1, 4.0).validate(e));
}

TEST_CASE("v_inf is an exact discrete steady state of the w-flow") {
  const ExponentSet& e = shl::test::exps_11_7();
  const LogGrid g{std::log(1e-6), std::log(1e4), 2048};
  const RadialOperator op = nonlinear_operator(g, e);
  const Reaction reaction = nonlinear_reaction(op, e);
  const RadialField V = RadialField::from_w(g, e.sigma, 0.0, [&](double r) { return v_infinity(r, e.params); });
  const auto AV = op.apply(V.W);
  std::vector<double> value(g.points), jac(g.points);
  reaction(V.W, 0.0, value, jac);
  for (int i = 0; i + 1 < g.points; ++i) {
    CHECK(std::abs(AV[i] + value[i]) <= 1e-12 * std::abs(AV[i]));
    CHECK(jac[i] <= 0.0);
  }
}

TEST_CASE("zero gap stays zero") {
  const ExponentSet& e = shl::test::exps_11_7();
  const Trajectory tr = evolve_nonlinear(InitialDataSpec::power_tail(0.0, 5.0), e, small_solver(10.0));
  for (const auto& s : tr.snapshots) {
    for (double W : s.W) CHECK(W == 0.0);
  }
  const ComparisonResult cmp = comparison_monitor(InitialDataSpec::power_tail(0.0, 5.0), e, small_solver(10.0));
  CHECK(cmp.max_violation == 0.0);
}

TEST_CASE("nonlinear gap stays below the linear flow") {
  const ExponentSet& e = shl::test::exps_11_7();
  const auto spec = InitialDataSpec::power_tail(0.1, 5.0);
  const ComparisonResult cmp = comparison_monitor(spec, e, small_solver(1e3));
  CHECK(cmp.max_violation <= 1e-6 * cmp.max_w0);
  for (std::size_t k = 0; k < cmp.min_gap.size(); ++k) CHECK(cmp.min_gap[k] >= -1e-6 * cmp.max_w0);
}

TEST_CASE("flow below psi_k") {
  const ExponentSet& e = shl::test::exps_11_7();
  const SolverConfig solver = small_solver(1e3);
  const RadialProfile psi1 = integrate_psi1(e.params, 1.01 * solver.grid.r_max(), 1e-10);

  const PsiKTrajectory still = evolve_near_psik(InitialDataSpec::psi_k_gap(1.0, 0.0, 1.0, 2.0), e, psi1, solver);
  for (const auto& s : still.v.snapshots) {
    for (double W : s.W) CHECK(W == doctest::Approx(0.0));
  }

  const PsiKTrajectory tr = evolve_near_psik(InitialDataSpec::psi_k_gap(1.0, 0.1, 1.0, 2.0), e, psi1, solver);
  double prev = std::numeric_limits<double>::infinity();
  for (const auto& s : tr.v.snapshots) {
    const double norm = weighted_norm(s, 11, {2.0, 1.0});
    CHECK(norm <= prev * (1.0 + 1e-12));
    prev = norm;
  }
  CHECK(tr.max_excess <= 1e-6 * 0.1);
  CHECK(tr.min_value >= -1e-10);
}

TEST_CASE("nonlinear flow needs the JL branch") {
  const ExponentSet low = compute_exponents({11, 1.25});
  REQUIRE(hardy_admissible(low.params) == HardyBranch::low_branch);
  CHECK_THROWS_AS(evolve_nonlinear(InitialDataSpec::power_tail(0.1, 8.5), low, small_solver(10.0)),
                  AdmissibilityError);
}
