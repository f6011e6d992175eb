#include "shl/report.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "shl/errors.hpp"

namespace shl {

namespace {

using nlohmann::json;

constexpr std::array<std::pair<Verdict, std::string_view>, 4> kVerdictNames{{
    {Verdict::pass, "PASS"},
    {Verdict::fail, "FAIL"},
    {Verdict::not_applicable, "NotApplicable"},
    {Verdict::inconclusive, "Inconclusive"},
}};

constexpr std::array<std::pair<VerdictRule, std::string_view>, 8> kRuleNames{{
    {VerdictRule::slope, "slope"},
    {VerdictRule::slope_at_least, "slope_at_least"},
    {VerdictRule::vanishing, "vanishing"},
    {VerdictRule::growth_band, "growth_band"},
    {VerdictRule::unbounded_growth, "unbounded_growth"},
    {VerdictRule::nonincreasing, "nonincreasing"},
    {VerdictRule::bounded_variation, "bounded_variation"},
    {VerdictRule::checks_only, "checks_only"},
}};

Verdict parse_verdict(std::string_view text) {
  for (const auto& [v, name] : kVerdictNames) {
    if (name == text) return v;
  }
  throw ConfigError("unknown verdict '" + std::string(text) + "'");
}

std::vector<double> in_window(const Report& r, const std::vector<double>& values) {
  std::vector<double> out;
  for (std::size_t i = 0; i < r.series.t.size(); ++i) {
    const double t = r.series.t[i];
    if (t >= r.window_lo * (1.0 - 1e-9) && t <= r.window_hi * (1.0 + 1e-9)) out.push_back(values[i]);
  }
  return out;
}

bool nonincreasing(const std::vector<double>& v) {
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[i - 1] * (1.0 + 1e-12)) return false;
  }
  return true;
}

bool all_zero(const std::vector<double>& v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return x == 0.0; });
}

json number_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double number_or(const json& j, const char* key, double fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return j.at(key).get<double>();
}

std::string format_double(double x) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x,
                                 std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

}  // namespace

std::string_view to_string(Verdict verdict) {
  for (const auto& [v, name] : kVerdictNames) {
    if (v == verdict) return name;
  }
  return "unknown";
}

std::string_view to_string(VerdictRule rule) {
  for (const auto& [r, name] : kRuleNames) {
    if (r == rule) return name;
  }
  return "unknown";
}

VerdictRule parse_verdict_rule(std::string_view text) {
  for (const auto& [r, name] : kRuleNames) {
    if (name == text) return r;
  }
  throw ConfigError("unknown verdict rule '" + std::string(text) + "'");
}

Verdict evaluate(const Report& report, std::optional<RateFit>* fit_out) {
  const Series& s = report.series;
  if (fit_out) fit_out->reset();
  if (report.rule != VerdictRule::checks_only && s.size() > 0 && all_zero(s.value) &&
      (!s.has_second() || all_zero(s.value2))) {
    return Verdict::not_applicable;
  }
  for (const auto& [name, ok] : report.checks) {
    if (!ok) return Verdict::fail;
  }

  const std::vector<double> v = in_window(report, s.value);
  auto fitted = [&]() -> std::optional<RateFit> {
    try {
      RateFit f = fit_rate(s, report.window_lo, report.window_hi);
      if (fit_out) *fit_out = f;
      return f;
    } catch (const DegenerateError&) {
      return std::nullopt;
    }
  };

  bool ok = false;
  switch (report.rule) {
    case VerdictRule::slope: {
      const auto f = fitted();
      ok = f && std::abs(f->slope - report.theoretical) <= report.tolerance &&
           f->rms_residual <= 0.1;
      break;
    }
    case VerdictRule::slope_at_least: {
      const auto f = fitted();
      ok = f && f->slope >= report.theoretical;
      break;
    }
    case VerdictRule::vanishing: {
      ok = v.size() >= 2 && nonincreasing(v) && v.back() <= report.tolerance * v.front();
      if (ok && s.has_second()) {
        const std::vector<double> v2 = in_window(report, s.value2);
        ok = v2.size() >= 2 && nonincreasing(v2) && v2.back() <= report.tolerance * v2.front();
      }
      break;
    }
    case VerdictRule::growth_band: {
      bool increasing = v.size() >= 2;
      for (std::size_t i = 1; i < v.size(); ++i) increasing = increasing && v[i] > v[i - 1];
      const auto f = fitted();
      ok = increasing && f && f->slope >= 0.0 && f->slope <= report.tolerance * report.theoretical;
      break;
    }
    case VerdictRule::unbounded_growth:
      ok = v.size() >= 2 && v.back() >= report.tolerance * v.front();
      break;
    case VerdictRule::nonincreasing:
      ok = v.size() >= 2 && nonincreasing(v);
      break;
    case VerdictRule::bounded_variation: {
      if (v.empty()) break;
      const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
      ok = *lo > 0.0 && *hi <= report.tolerance * *lo;
      break;
    }
    case VerdictRule::checks_only:
      ok = true;
      break;
  }
  return ok ? Verdict::pass : report.on_failure;
}

void finalize(Report& report) {
  std::optional<RateFit> fit;
  report.verdict = evaluate(report, &fit);
  if (!fit) {
    try {
      fit = fit_rate(report.series, report.window_lo, report.window_hi);
    } catch (const DegenerateError&) {
    }
  }
  report.fit = fit;
}

std::string series_to_csv(const Series& series) {
  std::string out = series.has_second() ? "t,value,value2\n" : "t,value\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    out += format_double(series.t[i]);
    out += ',';
    out += format_double(series.value[i]);
    if (series.has_second()) {
      out += ',';
      out += format_double(series.value2[i]);
    }
    out += '\n';
  }
  return out;
}

Series series_from_csv(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("empty series file");
  const bool second = line.find("value2") != std::string::npos;
  Series s;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::array<double, 3> cols{};
    std::size_t start = 0;
    const int want = second ? 3 : 2;
    for (int c = 0; c < want; ++c) {
      const std::size_t end = c + 1 < want ? line.find(',', start) : line.size();
      if (end == std::string::npos) throw ConfigError("malformed series row '" + line + "'");
      const auto res = std::from_chars(line.data() + start, line.data() + end, cols[c]);
      if (res.ec != std::errc()) throw ConfigError("malformed number in '" + line + "'");
      start = end + 1;
    }
    if (second) {
      s.push(cols[0], cols[1], cols[2]);
    } else {
      s.push(cols[0], cols[1]);
    }
  }
  return s;
}

std::string report_to_json(const Report& report, bool include_metadata) {
  json j;
  j["id"] = report.id;
  j["parameters"] = report.parameters;
  j["rule"] = std::string(to_string(report.rule));
  j["theoretical"] = number_or_null(report.theoretical);
  j["tolerance"] = number_or_null(report.tolerance);
  j["window"] = {number_or_null(report.window_lo), number_or_null(report.window_hi)};
  if (report.fit) {
    const RateFit& f = *report.fit;
    j["fit"] = {{"slope", f.slope},         {"intercept", f.intercept},
                {"t_lo", f.t_lo},           {"t_hi", f.t_hi},
                {"rms_residual", f.rms_residual}, {"n_samples", f.n_samples}};
  } else {
    j["fit"] = nullptr;
  }
  json metrics = json::object();
  for (const auto& [k, v] : report.metrics) metrics[k] = number_or_null(v);
  j["metrics"] = metrics;
  j["checks"] = report.checks;
  j["on_failure"] = std::string(to_string(report.on_failure));
  j["verdict"] = std::string(to_string(report.verdict));
  j["note"] = report.note;
  j["series_files"] = report.series_files;
  if (include_metadata) {
    const auto now = std::chrono::system_clock::now().time_since_epoch();
    j["metadata"] = {{"unix_time", std::chrono::duration_cast<std::chrono::seconds>(now).count()}};
  }
  return j.dump(2) + "\n";
}

Report report_from_json(std::string_view text, const Series& series) {
  const json j = json::parse(text);
  Report r;
  r.id = j.at("id").get<std::string>();
  r.parameters = j.at("parameters").get<std::map<std::string, std::string>>();
  r.rule = parse_verdict_rule(j.at("rule").get<std::string>());
  r.theoretical = number_or(j, "theoretical", std::numeric_limits<double>::quiet_NaN());
  r.tolerance = number_or(j, "tolerance", 0.0);
  const json& w = j.at("window");
  r.window_lo = w.at(0).is_null() ? 0.0 : w.at(0).get<double>();
  r.window_hi = w.at(1).is_null() ? std::numeric_limits<double>::infinity() : w.at(1).get<double>();
  if (!j.at("fit").is_null()) {
    const json& f = j.at("fit");
    r.fit = RateFit{f.at("slope"), f.at("intercept"), f.at("t_lo"),
                    f.at("t_hi"),  f.at("rms_residual"), f.at("n_samples")};
  }
  for (const auto& [k, v] : j.at("metrics").items()) {
    r.metrics[k] = v.is_null() ? std::numeric_limits<double>::quiet_NaN() : v.get<double>();
  }
  r.checks = j.at("checks").get<std::map<std::string, bool>>();
  r.on_failure = parse_verdict(j.at("on_failure").get<std::string>());
  r.verdict = parse_verdict(j.at("verdict").get<std::string>());
  r.note = j.value("note", "");
  r.series_files = j.at("series_files").get<std::vector<std::string>>();
  r.series = series;
  return r;
}

void write_file_atomic(const std::filesystem::path& path, std::string_view text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot open " + tmp.string() + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw ConfigError("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

void write_report(Report& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  const std::string csv_name = report.id + "_series.csv";
  report.series_files = {csv_name};
  write_file_atomic(dir / csv_name, series_to_csv(report.series));
  write_file_atomic(dir / (report.id + "_report.json"), report_to_json(report));
}

}  // namespace shl
