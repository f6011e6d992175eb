#include "shl/acceptance.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

#include "shl/errors.hpp"
#include "shl/experiments.hpp"
#include "shl/semigroup.hpp"
#include "shl/steady_states.hpp"

namespace shl {

namespace {

bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

std::string fixed(double x, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << x;
  return os.str();
}

std::string slope_text(const Report& r) {
  if (!r.fit) return r.id + " slope n/a";
  return r.id + " slope " + fixed(r.fit->slope) + " vs " + fixed(r.theoretical) + " (rms " +
         fixed(r.fit->rms_residual, 2) + ")";
}

std::string failed_checks(const Report& r) {
  std::string out;
  for (const auto& [name, ok] : r.checks) {
    if (!ok) out += (out.empty() ? "" : ",") + name;
  }
  return out.empty() ? "" : " failed checks: " + out;
}

struct Criterion {
  int number;
  std::string title;
  double time_limit;
  std::function<void(CriterionResult&)> body;
};

void exponent_identities(CriterionResult& out) {
  std::string bad;
  for (int n = 11; n <= 20; ++n) {
    const ExponentSet e = compute_exponents({n, joseph_lundgren_exponent(n)});
    const double quarter = (n - 2.0) * (n - 2.0) / 4.0;
    if (!rel_close(e.lambda, quarter, 1e-12)) bad += " lambda(n=" + std::to_string(n) + ")";
    if (!rel_close(e.sigma, 0.5 * (n - 2.0), 1e-12)) bad += " sigma(n=" + std::to_string(n) + ")";
    if (!(e.p_F < e.p_st && e.p_st < e.p_S && e.p_S < e.p_JL)) {
      bad += " ordering(n=" + std::to_string(n) + ")";
    }
  }
  const ExponentSet e = compute_exponents({11, 7.0});
  if (!rel_close(e.sigma, 13.0 / 3.0, 1e-12)) bad += " sigma(11,7)";
  if (!rel_close(e.lambda, 182.0 / 9.0, 1e-12)) bad += " lambda(11,7)";
  if (!rel_close(e.lambda1, 4.0, 1e-12)) bad += " lambda1(11,7)";
  if (!rel_close(e.L, std::pow(26.0 / 9.0, 1.0 / 6.0), 1e-12)) bad += " L(11,7)";
  out.passed = bad.empty();
  out.detail = bad.empty() ? "n = 11..20 at p_JL and (11,7) identities hold to 1e-12"
                           : "mismatch:" + bad;
}

void steady_state_structure(CriterionResult& out) {
  const ProblemParams jl{11, 7.0};
  const RadialProfile psi = integrate_psi1(jl, 300.0, 1e-12);
  const SteadyStateSummary s = summarize_steady_state(psi, jl);
  const ProblemParams low{11, 3.0};
  const RadialProfile psi3 = integrate_psi1(low, 1e2, 1e-10);
  const auto crossings = find_intersections(psi3, low);
  out.passed = s.strictly_decreasing && s.positive && s.ordering == SteadyOrdering::below &&
               !crossings.empty();
  out.detail = "(11,7) decreasing=" + std::to_string(s.strictly_decreasing) +
               " positive=" + std::to_string(s.positive) +
               " max psi/v_inf=" + fixed(s.max_ratio_to_v_inf, 12) +
               "; (11,3) crossings=" + std::to_string(crossings.size());
}

void solver_oracle(CriterionResult& out) {
  Report r = run_oracle_check({});
  out.passed = r.verdict == Verdict::pass;
  out.detail = "max rel error " + fixed(r.metrics["error_at_largest_dt"], 3) + " at dt = " +
               fixed(r.series.t.front()) + ", halving ratios " +
               fixed(r.metrics["halving_ratio_1"]) + ", " + fixed(r.metrics["halving_ratio_2"]) +
               failed_checks(r);
  out.reports.push_back(std::move(r));
}

void linear_decay(CriterionResult& out) {
  Report r = run_linear_decay({});
  out.passed = r.verdict == Verdict::pass;
  out.detail = slope_text(r);
  out.reports.push_back(std::move(r));
}

void nonlinear_rates(CriterionResult& out) {
  auto [inner, outer] = run_theorem_half_l({});
  out.passed = inner.verdict == Verdict::pass && outer.verdict == Verdict::pass;
  out.detail = slope_text(inner) + "; " + slope_text(outer) + "; comparison violation " +
               fixed(inner.metrics["comparison_violation"] / inner.metrics["max_w0"], 2) +
               " x max w0" + failed_checks(inner);
  out.reports.push_back(std::move(inner));
  out.reports.push_back(std::move(outer));
}

void vanishing_rates(CriterionResult& out) {
  Report r = run_theorem_mth2({});
  out.passed = r.verdict == Verdict::pass;
  out.detail = "final/initial inner " + fixed(r.metrics["inner_ratio"]) + ", outer " +
               fixed(r.metrics["outer_ratio"]) + " (limit " + fixed(r.tolerance) + ")";
  out.reports.push_back(std::move(r));
}

void supnorm_growth(CriterionResult& out) {
  Report r = run_corollary_small_b({});
  out.passed = r.verdict == Verdict::pass;
  out.detail = slope_text(r) + " (band [0, " + fixed(r.tolerance * r.theoretical) +
               "]), argmax slope " + fixed(r.metrics["argmax_slope"]) + " vs " +
               fixed(r.metrics["argmax_theory"]) + ", lower-bound violation " +
               fixed(r.metrics["lower_bound_violation"], 2) + failed_checks(r);
  out.reports.push_back(std::move(r));
}

void l2_stability(CriterionResult& out) {
  Report r = run_l2_stability({});
  Report psik = run_psik_stability({});
  const bool monotone = psik.checks["l2_nonincreasing"];
  out.passed = r.verdict == Verdict::pass && monotone;
  out.detail = slope_text(r) + "; psi_k gap non-increasing=" + std::to_string(monotone) + ", " +
               slope_text(psik);
  out.reports.push_back(std::move(r));
  out.reports.push_back(std::move(psik));
}

void kernel_and_smoothing(CriterionResult& out) {
  Report k = run_kernel_check({});
  Report s = run_smoothing_check({});
  out.passed = k.verdict == Verdict::pass && s.verdict == Verdict::pass;
  double slope_lo = 0.0, slope_hi = -1e300;
  slope_lo = *std::min_element(k.series.value2.begin(), k.series.value2.end());
  slope_hi = *std::max_element(k.series.value2.begin(), k.series.value2.end());
  const auto [lo, hi] = std::minmax_element(s.series.value.begin(), s.series.value.end());
  out.detail = "best c " + fixed(k.metrics["best_c"]) + " (variation c=1,2,4: " +
               fixed(k.metrics["variation_c1"]) + ", " + fixed(k.metrics["variation_c2"]) + ", " +
               fixed(k.metrics["variation_c4"]) + "), origin slopes [" + fixed(slope_lo) + ", " +
               fixed(slope_hi) + "] vs " + fixed(-k.metrics["sigma"]) +
               "; smoothing ratio variation " + fixed(*hi / *lo);
  out.reports.push_back(std::move(k));
  out.reports.push_back(std::move(s));
}

void property_suites(CriterionResult& out) {
  const auto outcomes = run_property_suites(1000);
  out.passed = true;
  std::string detail;
  for (const auto& o : outcomes) {
    out.passed = out.passed && o.failures == 0;
    detail += (detail.empty() ? "" : ", ") + o.name + " " +
              std::to_string(o.cases - o.failures) + "/" + std::to_string(o.cases);
    if (o.failures > 0) detail += " (" + o.first_failure + ")";
  }
  out.detail = detail;
}

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> list{
      {1, "exponent identities", 1.0, exponent_identities},
      {2, "steady-state ordering", 10.0, steady_state_structure},
      {3, "solver vs dense oracle", 30.0, solver_oracle},
      {4, "linear weighted decay", 300.0, linear_decay},
      {5, "nonlinear inner/outer rates", 600.0, nonlinear_rates},
      {6, "sigma-tail vanishing", 600.0, vanishing_rates},
      {7, "sup-norm growth for small b", 1200.0, supnorm_growth},
      {8, "L2 stability", 600.0, l2_stability},
      {9, "kernel and smoothing bounds", 300.0, kernel_and_smoothing},
      {10, "randomized invariant suites", 120.0, property_suites},
  };
  return list;
}

// ---- property suites -------------------------------------------------------

struct Tally {
  PropertyOutcome o;
  void record(bool ok, const std::string& what) {
    ++o.cases;
    if (!ok) {
      if (o.failures == 0) o.first_failure = what;
      ++o.failures;
    }
  }
};

ProblemParams random_jl_params(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(11, 30);
  const int n = dim(rng);
  std::uniform_real_distribution<double> lift(0.0, 1.0);
  const double p_jl = joseph_lundgren_exponent(n);
  return {n, p_jl + 20.0 * std::pow(lift(rng), 2)};
}

LogGrid random_grid(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> lo(-10.0, -1.0), span(2.0, 12.0);
  std::uniform_int_distribution<int> pts(16, 96);
  const double s0 = lo(rng);
  return {s0, s0 + span(rng), pts(rng)};
}

PropertyOutcome positivity_suite(int cases, std::mt19937_64& rng) {
  Tally t{{"positivity", 0, 0, {}}};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 0; c < cases; ++c) {
    const ExponentSet e = compute_exponents(random_jl_params(rng));
    const LogGrid g = random_grid(rng);
    const RadialOperator op = assemble_operator(g, e);
    RadialField f{g, std::vector<double>(g.points), e.sigma, 0.0};
    double top = 0.0;
    for (double& w : f.W) {
      w = unit(rng) < 0.3 ? 0.0 : unit(rng);
      top = std::max(top, w);
    }
    const double dt = std::pow(10.0, -4.0 + 4.0 * unit(rng));
    RadialField out = step_implicit(f, op, {}, dt);
    out = step_implicit(out, op, {}, dt);
    const double lo = *std::min_element(out.W.begin(), out.W.end());
    t.record(lo >= -1e-10 * top, "min " + std::to_string(lo) + " at dt " + std::to_string(dt));
  }
  return t.o;
}

PropertyOutcome maximum_principle_suite(int cases, std::mt19937_64& rng) {
  Tally t{{"maximum_principle", 0, 0, {}}};
  std::uniform_real_distribution<double> unit(-1.0, 1.0), u01(0.0, 1.0);
  for (int c = 0; c < cases; ++c) {
    const ExponentSet e = compute_exponents(random_jl_params(rng));
    const LogGrid g = random_grid(rng);
    const RadialOperator op(g, e.n(), e.sigma, BoundaryConditions::neumann_both());
    RadialField f{g, std::vector<double>(g.points), e.sigma, 0.0};
    for (double& w : f.W) w = unit(rng);
    const auto [lo, hi] = std::minmax_element(f.W.begin(), f.W.end());
    const double lo0 = *lo, hi0 = *hi;
    const double dt = std::pow(10.0, -4.0 + 4.0 * u01(rng));
    const RadialField out = step_implicit(f, op, {}, dt);
    const auto [lo1, hi1] = std::minmax_element(out.W.begin(), out.W.end());
    const double slack = 1e-12 * std::max(std::abs(lo0), std::abs(hi0));
    t.record(*lo1 >= lo0 - slack && *hi1 <= hi0 + slack, "range escaped at dt " + std::to_string(dt));
  }
  return t.o;
}

PropertyOutcome defect_suite(int cases, std::mt19937_64& rng) {
  Tally t{{"defect_nonnegative", 0, 0, {}}};
  std::uniform_real_distribution<double> unit(0.0, 1.0), logr(-12.0, 12.0);
  for (int c = 0; c < cases; ++c) {
    const ExponentSet e = compute_exponents(random_jl_params(rng));
    const double r = std::exp(logr(rng));
    const double v = v_infinity(r, e.params);
    // Mix tiny and O(1) fractions of v_inf.
    const double x = unit(rng) < 0.5 ? std::pow(10.0, -12.0 * unit(rng)) : unit(rng);
    const double N = nonlinear_defect(x * v, r, e);
    t.record(N >= 0.0 && std::isfinite(N), "N = " + std::to_string(N));
  }
  return t.o;
}

PropertyOutcome l2_identity_suite(int cases, std::mt19937_64& rng) {
  Tally t{{"q2_norm_identity", 0, 0, {}}};
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 0; c < cases; ++c) {
    const ExponentSet e = compute_exponents(random_jl_params(rng));
    const LogGrid g = random_grid(rng);
    RadialField f{g, std::vector<double>(g.points, 0.0), e.sigma, 0.0};
    // Random values away from both ends so the integrand vanishes there.
    for (int i = 2; i + 2 < g.points; ++i) f.W[i] = unit(rng) - 0.5;
    const double time = std::pow(10.0, -3.0 + 6.0 * unit(rng));
    const double weighted = weighted_norm(f, e.n(), {2.0, time});
    double sum = 0.0;
    for (int i = 0; i < g.points; ++i) {
      const double w = f.w(i);
      const double end = (i == 0 || i + 1 == g.points) ? 0.5 : 1.0;
      sum += end * w * w * std::pow(g.r(i), e.n());
    }
    const double plain = std::sqrt(sphere_area(e.n()) * sum * g.h());
    t.record(rel_close(weighted, plain, 1e-12), std::to_string(weighted) + " vs " + std::to_string(plain));
  }
  return t.o;
}

PropertyOutcome fit_suite(int cases, std::mt19937_64& rng) {
  Tally t{{"fit_rate_exact", 0, 0, {}}};
  std::uniform_real_distribution<double> slope(-5.0, 5.0), amp(-3.0, 3.0), start(-2.0, 3.0),
      span(1.0, 5.0);
  std::uniform_int_distribution<int> count(4, 40);
  for (int c = 0; c < cases; ++c) {
    const double a = slope(rng);
    const double scale = std::pow(10.0, amp(rng));
    const double t0 = std::pow(10.0, start(rng));
    const double t1 = t0 * std::pow(10.0, span(rng));
    const int k = count(rng);
    Series s;
    for (int i = 0; i < k; ++i) {
      const double time = t0 * std::pow(t1 / t0, static_cast<double>(i) / (k - 1));
      s.push(time, scale * std::pow(time, a));
    }
    const RateFit fit = fit_rate(s, t0, t1);
    t.record(std::abs(fit.slope - a) <= 1e-12 * std::max(1.0, std::abs(a)),
             "slope " + std::to_string(fit.slope) + " vs " + std::to_string(a));
  }
  return t.o;
}

PropertyOutcome exponent_suite(int cases, std::mt19937_64& rng) {
  Tally t{{"exponent_identities", 0, 0, {}}};
  std::uniform_int_distribution<int> dim(3, 40);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int c = 0; c < cases; ++c) {
    const int n = dim(rng);
    const double p = singular_threshold_exponent(n) + 0.01 + 40.0 * std::pow(unit(rng), 3);
    const ProblemParams params{n, p};
    const double lambda = hardy_coefficient(params);
    const bool direct = lambda <= (n - 2.0) * (n - 2.0) / 4.0;
    const HardyBranch branch = hardy_admissible(params);
    bool ok = (branch != HardyBranch::inadmissible) == direct;
    std::string what = "classification n=" + std::to_string(n) + " p=" + std::to_string(p);
    if (ok && branch != HardyBranch::inadmissible) {
      const ExponentSet e = compute_exponents(params);
      ok = rel_close(e.sigma * (n - 2.0 - e.sigma), e.lambda, 1e-12) &&
           rel_close(e.sigma, e.m + e.lambda1, 1e-12);
      what = "sigma identities n=" + std::to_string(n) + " p=" + std::to_string(p);
    }
    t.record(ok, what);
  }
  return t.o;
}

}  // namespace

int acceptance_criterion_count() { return static_cast<int>(criteria().size()); }

void run_pool(const std::vector<std::function<void()>>& tasks, int jobs) {
  const int workers = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  std::atomic<std::size_t> next{0};
  std::mutex mutex;
  std::exception_ptr first_error;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        tasks[i]();
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  std::vector<std::thread> threads;
  for (int w = 1; w < workers; ++w) threads.emplace_back(worker);
  worker();
  for (auto& th : threads) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::vector<CriterionResult> run_acceptance(int jobs, const std::vector<int>& only,
                                            const std::optional<std::filesystem::path>& output_dir) {
  std::vector<const Criterion*> selected;
  for (const auto& c : criteria()) {
    if (only.empty() || std::find(only.begin(), only.end(), c.number) != only.end()) {
      selected.push_back(&c);
    }
  }
  std::vector<CriterionResult> results(selected.size());
  std::vector<std::function<void()>> tasks;
  for (std::size_t i = 0; i < selected.size(); ++i) {
    tasks.emplace_back([&, i] {
      const Criterion& c = *selected[i];
      CriterionResult& out = results[i];
      out.number = c.number;
      out.title = c.title;
      out.time_limit = c.time_limit;
      const auto start = std::chrono::steady_clock::now();
      try {
        c.body(out);
      } catch (const std::exception& e) {
        out.passed = false;
        out.detail = std::string("error: ") + e.what();
      }
      out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (out.seconds >= c.time_limit) {
        out.passed = false;
        out.detail += " [runtime over " + fixed(c.time_limit) + " s]";
      }
    });
  }
  run_pool(tasks, jobs);
  if (output_dir) {
    for (auto& res : results) {
      for (auto& r : res.reports) write_report(r, *output_dir);
    }
  }
  return results;
}

std::string format_criterion(const CriterionResult& r) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(2);
  os << (r.passed ? "[PASS] " : "[FAIL] ") << r.number << ". " << r.title << " (" << r.seconds
     << " s): " << r.detail;
  return os.str();
}

std::vector<PropertyOutcome> run_property_suites(int cases, unsigned long long seed) {
  std::mt19937_64 rng(seed);
  return {positivity_suite(cases, rng),    maximum_principle_suite(cases, rng),
          defect_suite(cases, rng),        l2_identity_suite(cases, rng),
          fit_suite(cases, rng),           exponent_suite(cases, rng)};
}

}  // namespace shl
