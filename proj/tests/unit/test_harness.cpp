#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "shl/config.hpp"
#include "shl/errors.hpp"
#include "shl/experiments.hpp"
#include "shl/rate_fit.hpp"
#include "shl/report.hpp"
#include "shl/steady_states.hpp"
#include "shl/weights.hpp"
#include "support.hpp"

using namespace shl;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
  const char* base = std::getenv("SHL_TEST_TMP");
  fs::path dir = fs::path(base ? base : fs::temp_directory_path().string()) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

Series power_series(double scale, double slope, double lo, double hi, int count) {
  Series s;
  for (int i = 0; i < count; ++i) {
    const double t = lo * std::pow(hi / lo, static_cast<double>(i) / (count - 1));
    s.push(t, scale * std::pow(t, slope));
  }
  return s;
}

Report report_with(VerdictRule rule, Series s, double theory, double tol) {
  Report r;
  r.id = "probe";
  r.rule = rule;
  r.series = std::move(s);
  r.theoretical = theory;
  r.tolerance = tol;
  r.window_lo = 1.0;
  r.window_hi = 1e4;
  return r;
}

}  // namespace

TEST_CASE("fit of an exact power law") {
  const RateFit f = fit_rate(power_series(7.0, -2.5, 1.0, 1e4, 13), 1.0, 1e4);
  CHECK(std::abs(f.slope + 2.5) <= 1e-12);
  CHECK(f.rms_residual < 1e-12);
  CHECK(f.n_samples == 13);
  CHECK(std::exp(f.intercept) == doctest::Approx(7.0));
}

TEST_CASE("fit with multiplicative noise") {
  auto gen = shl::test::rng(3);
  std::normal_distribution<double> noise(0.0, 0.01);
  Series s;
  for (int i = 0; i < 25; ++i) {
    const double t = std::pow(10.0, 1.0 + 3.0 * i / 24.0);
    s.push(t, std::pow(t, -1.0 / 3.0) * (1.0 + noise(gen)));
  }
  CHECK(std::abs(fit_rate(s, 10.0, 1e4).slope + 1.0 / 3.0) <= 0.02);
}

TEST_CASE("fit window and degenerate input") {
  const Series s = power_series(1.0, -1.0, 1.0, 1e4, 9);
  CHECK(fit_rate(s, 10.0, 1e3).n_samples == 5);
  CHECK_THROWS_AS(fit_rate(power_series(1.0, -1.0, 1.0, 10.0, 3), 1.0, 10.0), DegenerateError);
  Series bad = s;
  bad.value[4] = 0.0;
  CHECK_THROWS_AS(fit_rate(bad, 1.0, 1e4), DegenerateError);
}

TEST_CASE("inner and outer monitors") {
  const ExponentSet& e = shl::test::exps_11_7();
  const LogGrid g{std::log(1e-4), std::log(100.0), 4001};
  const double t = 4.0;
  const RadialField w = RadialField::from_w(g, e.sigma, 0.0, [&](double r) {
    return phi(r, t, e.sigma) * std::pow(t, -2.5);
  });
  CHECK(inner_weighted_sup(w, t) == doctest::Approx(std::pow(2.0, e.sigma - 5.0)).epsilon(1e-10));
  CHECK(outer_sup(w, t) == doctest::Approx(std::pow(2.0, -5.0)).epsilon(1e-10));

  const RadialField v = RadialField::from_w(g, e.sigma, 0.0, [&](double r) { return v_infinity(r, e.params); });
  // r^sigma v_inf = L r^{sigma - m} is increasing, so the sup sits at the last node below sqrt t.
  const double exact = e.L * std::pow(t, 0.5 * (e.sigma - e.m));
  CHECK(inner_weighted_sup(v, t) <= exact);
  CHECK(inner_weighted_sup(v, t) == doctest::Approx(exact).epsilon(2e-2));

  const RadialField zero{g, std::vector<double>(g.points, 0.0), e.sigma, 0.0};
  CHECK(inner_weighted_sup(zero, t) == 0.0);
  CHECK(outer_sup(zero, t) == 0.0);
  CHECK_THROWS_AS(outer_sup(zero, 1e6), EmptyRegionError);
}

TEST_CASE("verdict rules") {
  const Series decay = power_series(1.0, -2.5, 1.0, 1e4, 9);
  CHECK(evaluate(report_with(VerdictRule::slope, decay, -2.5, 0.25)) == Verdict::pass);
  CHECK(evaluate(report_with(VerdictRule::slope, decay, -2.0, 0.2)) == Verdict::fail);
  CHECK(evaluate(report_with(VerdictRule::slope_at_least, decay, -3.0, 0.0)) == Verdict::pass);
  CHECK(evaluate(report_with(VerdictRule::vanishing, decay, 0.0, 0.2)) == Verdict::pass);
  CHECK(evaluate(report_with(VerdictRule::nonincreasing, decay, 0.0, 0.0)) == Verdict::pass);

  const Series growth = power_series(1.0, 0.03, 1.0, 1e4, 9);
  CHECK(evaluate(report_with(VerdictRule::growth_band, growth, 1.0 / 36.0, 2.0)) == Verdict::pass);
  CHECK(evaluate(report_with(VerdictRule::growth_band, decay, 1.0 / 36.0, 2.0)) == Verdict::fail);
  CHECK(evaluate(report_with(VerdictRule::unbounded_growth, power_series(1.0, 0.2, 1.0, 1e4, 9), 0.0, 2.0)) ==
        Verdict::pass);
  CHECK(evaluate(report_with(VerdictRule::bounded_variation, growth, 0.0, 3.0)) == Verdict::pass);

  Report slow = report_with(VerdictRule::vanishing, power_series(1.0, -0.05, 1.0, 1e4, 9), 0.0, 0.2);
  CHECK(evaluate(slow) == Verdict::fail);
  slow.on_failure = Verdict::inconclusive;
  CHECK(evaluate(slow) == Verdict::inconclusive);

  Report zero = report_with(VerdictRule::slope, power_series(0.0, 1.0, 1.0, 1e4, 9), -2.5, 0.25);
  CHECK(evaluate(zero) == Verdict::not_applicable);

  Report checked = report_with(VerdictRule::slope, decay, -2.5, 0.25);
  checked.checks["comparison"] = false;
  CHECK(evaluate(checked) == Verdict::fail);
  CHECK(parse_verdict_rule("growth_band") == VerdictRule::growth_band);
  CHECK_THROWS_AS(parse_verdict_rule("magic"), ConfigError);
}

TEST_CASE("series CSV round trip is exact") {
  Series s;
  auto gen = shl::test::rng(4);
  std::uniform_real_distribution<double> u(-30.0, 30.0);
  for (int i = 0; i < 50; ++i) s.push(std::exp(u(gen)), std::exp(u(gen)), -std::exp(u(gen)));
  const std::string text = series_to_csv(s);
  CHECK(text.rfind("t,value,value2\n", 0) == 0);
  const Series back = series_from_csv(text);
  CHECK(back.t == s.t);
  CHECK(back.value == s.value);
  CHECK(back.value2 == s.value2);
}

TEST_CASE("report JSON is deterministic and round-trips") {
  Report r = report_with(VerdictRule::slope, power_series(2.0, -0.5, 1.0, 1e4, 9), -0.5, 0.05);
  r.parameters = {{"problem.n", "11"}, {"problem.p", "7"}};
  r.metrics["sigma"] = 13.0 / 3.0;
  r.metrics["missing"] = std::nan("");
  r.checks["ok"] = true;
  finalize(r);
  const std::string a = report_to_json(r, false);
  const std::string b = report_to_json(r, false);
  CHECK(a == b);
  CHECK(a.find("metadata") == std::string::npos);
  CHECK(report_to_json(r, true).find("metadata") != std::string::npos);
  const Report back = report_from_json(a, r.series);
  CHECK(back.verdict == Verdict::pass);
  CHECK(back.fit->slope == r.fit->slope);
  CHECK(std::isnan(back.metrics.at("missing")));
  CHECK(report_to_json(back, false) == a);
}

TEST_CASE("reports are written atomically") {
  const fs::path dir = scratch_dir("reports");
  Report r = report_with(VerdictRule::slope, power_series(2.0, -0.5, 1.0, 1e4, 9), -0.5, 0.05);
  finalize(r);
  write_report(r, dir);
  CHECK(fs::exists(dir / "probe_series.csv"));
  CHECK(fs::exists(dir / "probe_report.json"));
  for (const auto& entry : fs::directory_iterator(dir)) CHECK(entry.path().extension() != ".tmp");
  REQUIRE(r.series_files.size() == 1);
  CHECK(r.series_files.front() == "probe_series.csv");
}

TEST_CASE("config files") {
  const fs::path dir = scratch_dir("config");
  {
    std::ofstream out(dir / "desk.cfg");
    out << "[problem]\nn = 12\np = 9.5\n\n[grid]\npoints = 512\n\n[experiment]\nkind = sigma-tail\nb = 0.05\n";
  }
  const ExperimentConfig c = load_config(dir / "desk.cfg");
  CHECK(c.problem.n == 12);
  CHECK(c.problem.p == 9.5);
  CHECK(c.solver.grid.points == 512);
  CHECK(c.kind == "sigma-tail");
  CHECK(*c.b == 0.05);
  const auto echo = echo_config(c);
  CHECK(echo.at("problem.n") == "12");
  CHECK(echo.count("time.dt0") == 1);

  {
    std::ofstream out(dir / "bad.cfg");
    out << "[problem]\nq = 1\n";
  }
  CHECK_THROWS_AS(load_config(dir / "bad.cfg"), ConfigError);
  {
    std::ofstream out(dir / "loose.cfg");
    out << "n = 11\n";
  }
  CHECK_THROWS_AS(load_config(dir / "loose.cfg"), ConfigError);
  CHECK_THROWS_AS(load_config(dir / "absent.cfg"), ConfigError);
  ExperimentConfig d;
  CHECK_THROWS_AS(apply_setting(d, "grid.points", "many"), ConfigError);
}

TEST_CASE("experiment reports on degenerate data") {
  ExperimentConfig c;
  c.b = 0.0;
  auto [inner, outer] = run_theorem_half_l(c);
  CHECK(inner.verdict == Verdict::not_applicable);
  CHECK(outer.verdict == Verdict::not_applicable);
  CHECK(run_l2_stability(c).verdict == Verdict::not_applicable);
  CHECK(run_theorem_mth2(c).verdict == Verdict::not_applicable);
}

TEST_CASE("ell at sigma reports inconclusive vanishing") {
  ExperimentConfig c;
  c.kind = "power-tail";
  c.ell = 13.0 / 3.0;
  const Report r = run_theorem_mth2(c);
  CHECK(r.verdict == Verdict::inconclusive);
}

TEST_CASE("inner series does not decay for ell below sigma") {
  ExperimentConfig c;
  c.ell = 3.0;
  auto [inner, outer] = run_theorem_half_l(c);
  CHECK(inner.rule == VerdictRule::slope_at_least);
  CHECK(inner.verdict == Verdict::pass);
  CHECK(inner.parameters.at("experiment.ell") == "3");
}
