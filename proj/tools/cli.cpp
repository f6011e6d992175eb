#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <optional>
#include <ostream>
#include <thread>

#include "shl/acceptance.hpp"
#include "shl/config.hpp"
#include "shl/errors.hpp"
#include "shl/experiments.hpp"
#include "shl/report.hpp"
#include "shl/steady_states.hpp"

namespace shl::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

/// Raised for invalid invocations; maps to exit code 2.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

struct Options {
  std::string config_path;
  std::string output_dir;
  int jobs = 0;
  std::vector<std::string> settings;  // section.key=value
  std::vector<int> only;
  // Convenience overrides, applied after the config file.
  std::optional<int> n;
  std::optional<double> p, ell, b, k, tolerance, rho, r_max;
  std::optional<std::string> data;
};

void add_problem_flags(CLI::App* sub, Options& o) {
  sub->add_option("--n", o.n, "spatial dimension");
  sub->add_option("--p", o.p, "nonlinearity exponent");
}

void add_experiment_flags(CLI::App* sub, Options& o) {
  add_problem_flags(sub, o);
  sub->add_option("--config", o.config_path, "config file with [section] key = value lines");
  sub->add_option("--output-dir", o.output_dir, "directory for CSV/JSON reports");
  sub->add_option("--set", o.settings, "override section.key=value (repeatable)");
  sub->add_option("--ell", o.ell, "tail exponent");
  sub->add_option("--b", o.b, "data amplitude");
  sub->add_option("--k", o.k, "psi_k scale");
  sub->add_option("--tolerance", o.tolerance, "verdict tolerance");
  sub->add_option("--rho", o.rho, "kernel source radius");
  sub->add_option("--jobs", o.jobs, "worker threads");
}

fs::path output_dir(const Options& o) {
  if (!o.output_dir.empty()) return o.output_dir;
  if (const char* env = std::getenv("SHL_OUTPUT_DIR"); env && *env) return env;
  return "shl_output";
}

std::string number_text(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

ExperimentConfig effective_config(const Options& o) {
  ExperimentConfig config;
  if (!o.config_path.empty()) load_config_into(config, o.config_path);
  for (const auto& s : o.settings) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
    apply_setting(config, s.substr(0, eq), s.substr(eq + 1));
  }
  if (o.n) apply_setting(config, "problem.n", std::to_string(*o.n));
  if (o.p) apply_setting(config, "problem.p", number_text(*o.p));
  if (o.ell) apply_setting(config, "experiment.ell", number_text(*o.ell));
  if (o.b) apply_setting(config, "experiment.b", number_text(*o.b));
  if (o.k) apply_setting(config, "experiment.k", number_text(*o.k));
  if (o.tolerance) apply_setting(config, "experiment.tolerance", number_text(*o.tolerance));
  if (o.rho) apply_setting(config, "experiment.rho", number_text(*o.rho));
  if (o.data) apply_setting(config, "experiment.kind", *o.data);
  // Domain checks up front so invalid (n, p) is a usage error.
  compute_exponents(config.problem);
  return config;
}

int emit(std::vector<Report> reports, const Options& o, std::ostream& out) {
  const fs::path dir = output_dir(o);
  bool failed = false;
  for (auto& r : reports) {
    write_report(r, dir);
    failed = failed || r.verdict == Verdict::fail;
    out << to_string(r.verdict) << ' ' << r.id;
    const bool sloped = r.rule == VerdictRule::slope || r.rule == VerdictRule::slope_at_least ||
                        r.rule == VerdictRule::growth_band;
    if (sloped && r.fit) out << " slope " << r.fit->slope << " theory " << r.theoretical;
    out << " -> " << (dir / (r.id + "_report.json")).string() << '\n';
  }
  return failed ? 1 : 0;
}

int cmd_exponents(const Options& o, std::ostream& out) {
  if (!o.n || !o.p) throw UsageError("exponents requires --n and --p");
  const ProblemParams params{*o.n, *o.p};
  const ExponentSet e = compute_exponents(params);
  json j;
  j["n"] = e.n();
  j["p"] = e.p();
  j["p_F"] = e.p_F;
  j["p_st"] = e.p_st;
  j["p_S"] = e.p_S;
  j["p_JL"] = finite_or_null(e.p_JL);
  j["m"] = e.m;
  j["L"] = e.L;
  j["lambda"] = e.lambda;
  j["sigma"] = e.sigma;
  j["lambda1"] = e.lambda1;
  j["ell_window"] = {e.ell_window.lo, e.ell_window.hi};
  j["drift"] = e.drift();
  j["branch"] = std::string(to_string(hardy_admissible(params)));
  out << j.dump(2) << '\n';
  return 0;
}

int cmd_steady_state(const Options& o, std::ostream& out) {
  const ProblemParams params{o.n.value_or(11), o.p.value_or(7.0)};
  compute_exponents(params);
  const double k = o.k.value_or(1.0);
  const double r_max = o.r_max.value_or(100.0);
  if (!(k > 0.0) || !(r_max > 0.0)) throw UsageError("--k and --r-max must be positive");
  const double stretch = std::pow(k, 0.5 * (params.p - 1.0));
  const RadialProfile psi1 = integrate_psi1(params, std::max(10.0, r_max * stretch), 1e-12);
  const SteadyStateSummary s = summarize_steady_state(psi1, params);

  std::string csv = "r,value\n";
  for (double rho : psi1.radii()) {
    const double r = rho / stretch;
    if (r > r_max) break;
    csv += number_text(r) + "," + number_text(psi_k(psi1, k, r)) + "\n";
  }
  json j;
  j["n"] = params.n;
  j["p"] = params.p;
  j["k"] = k;
  j["r_max"] = r_max;
  j["center_value"] = k;
  j["ordering"] = s.ordering == SteadyOrdering::below ? "below" : "intersects";
  j["strictly_decreasing"] = s.strictly_decreasing;
  j["positive"] = s.positive;
  j["max_ratio_to_v_inf"] = s.max_ratio_to_v_inf;
  std::vector<double> crossings;
  for (double r : s.intersections) crossings.push_back(r / stretch);
  j["intersections"] = crossings;

  const fs::path dir = output_dir(o);
  fs::create_directories(dir);
  write_file_atomic(dir / "steady_state_profile.csv", csv);
  write_file_atomic(dir / "steady_state_summary.json", j.dump(2) + "\n");
  out << j.dump(2) << '\n';
  return 0;
}

int cmd_nonlinear_decay(const Options& o, std::ostream& out) {
  ExperimentConfig config = effective_config(o);
  const std::string kind = config.kind.empty() ? "power-tail" : config.kind;
  switch (parse_data_kind(kind)) {
    case DataKind::power_tail: {
      const ExponentSet e = compute_exponents(config.problem);
      const double ell = config.ell.value_or(5.0);
      if (!e.ell_window.contains(ell)) {
        throw UsageError("ell = " + number_text(ell) + " outside (sigma, n - sigma) = (" +
                         number_text(e.ell_window.lo) + ", " + number_text(e.ell_window.hi) + ")");
      }
      auto [inner, outer] = run_theorem_half_l(config);
      return emit({std::move(inner), std::move(outer)}, o, out);
    }
    case DataKind::sigma_tail:
      return emit({run_theorem_mth2(config)}, o, out);
    case DataKind::annulus:
      return emit({run_l2_stability(config)}, o, out);
    case DataKind::psi_k_gap:
      return emit({run_psik_stability(config)}, o, out);
  }
  return 2;
}

int cmd_all(const Options& o, std::ostream& out) {
  // Acceptance parameters are pinned; a config file is only validated.
  if (!o.config_path.empty()) load_config(o.config_path);
  const int jobs = o.jobs > 0 ? o.jobs : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const auto results = run_acceptance(jobs, o.only, output_dir(o));
  bool ok = true;
  for (const auto& r : results) {
    out << format_criterion(r) << '\n';
    ok = ok && r.passed;
  }
  return ok ? 0 : 1;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"numerical lab for u_t = Laplace u + u^p near the singular steady state"};
  app.require_subcommand(1);
  Options o;
  std::function<int()> action;

  auto* exponents = app.add_subcommand("exponents", "print every derived exponent as JSON");
  add_problem_flags(exponents, o);
  exponents->callback([&] { action = [&] { return cmd_exponents(o, out); }; });

  auto* steady = app.add_subcommand("steady-state", "radial steady state psi_k vs v_inf");
  add_problem_flags(steady, o);
  steady->add_option("--k", o.k, "center value psi_k(0)");
  steady->add_option("--r-max", o.r_max, "largest radius of the profile");
  steady->add_option("--output-dir", o.output_dir, "directory for the CSV/JSON output");
  steady->callback([&] { action = [&] { return cmd_steady_state(o, out); }; });

  using Runner = std::function<std::vector<Report>(const ExperimentConfig&)>;
  const std::vector<std::tuple<std::string, std::string, Runner>> experiments{
      {"linear-decay", "weighted sup decay of the linear flow",
       [](const ExperimentConfig& c) { return std::vector<Report>{run_linear_decay(c)}; }},
      {"supnorm-growth", "sup-norm growth for small amplitude",
       [](const ExperimentConfig& c) { return std::vector<Report>{run_corollary_small_b(c)}; }},
      {"l2-stability", "L2 decay of annulus data",
       [](const ExperimentConfig& c) { return std::vector<Report>{run_l2_stability(c)}; }},
      {"psik-stability", "L2 gap to psi_k",
       [](const ExperimentConfig& c) { return std::vector<Report>{run_psik_stability(c)}; }},
      {"kernel-check", "kernel upper bound sweep",
       [](const ExperimentConfig& c) { return std::vector<Report>{run_kernel_check(c)}; }},
      {"smoothing-check", "L1 to L2 smoothing ratio",
       [](const ExperimentConfig& c) { return std::vector<Report>{run_smoothing_check(c)}; }},
  };
  for (const auto& [name, help, runner] : experiments) {
    auto* sub = app.add_subcommand(name, help);
    add_experiment_flags(sub, o);
    sub->callback([&, runner = runner] {
      action = [&, runner] { return emit(runner(effective_config(o)), o, out); };
    });
  }

  auto* nonlinear = app.add_subcommand("nonlinear-decay", "nonlinear flow below v_inf");
  add_experiment_flags(nonlinear, o);
  nonlinear->add_option("--data", o.data, "power-tail | sigma-tail | annulus | psi-k");
  nonlinear->callback([&] { action = [&] { return cmd_nonlinear_decay(o, out); }; });

  auto* all = app.add_subcommand("all", "run the acceptance suite");
  all->add_option("--config", o.config_path, "config file (validated only)");
  all->add_option("--output-dir", o.output_dir, "directory for CSV/JSON reports");
  all->add_option("--jobs", o.jobs, "worker threads");
  all->add_option("--only", o.only, "criterion numbers to run");
  all->callback([&] { action = [&] { return cmd_all(o, out); }; });

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  try {
    return action();
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "invalid parameters: " << e.what() << '\n';
    return 2;
  } catch (const AdmissibilityError& e) {
    err << "invalid parameters: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "run failed: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace shl::cli
