#include "shl/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <array>
#include <charconv>
#include <cmath>

#include "shl/errors.hpp"

namespace shl {

namespace {

double parse_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const char* first = text.data();
  const char* last = text.data() + text.size();
  while (first < last && *first == ' ') ++first;
  while (last > first && last[-1] == ' ') --last;
  const auto res = std::from_chars(first, last, v);
  if (res.ec != std::errc() || res.ptr != last || !std::isfinite(v)) {
    throw ConfigError("invalid number '" + text + "' for " + key);
  }
  return v;
}

int parse_int(const std::string& key, const std::string& text) {
  const double v = parse_double(key, text);
  if (v != std::floor(v) || std::abs(v) > 1e9) {
    throw ConfigError("expected an integer for " + key + ", got '" + text + "'");
  }
  return static_cast<int>(v);
}

std::string format(double x) {
  std::array<char, 32> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x,
                                 std::chars_format::general, 17);
  return std::string(buf.data(), res.ptr);
}

}  // namespace

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value) {
  auto num = [&] { return parse_double(key, value); };
  if (key == "problem.n") {
    c.problem.n = parse_int(key, value);
  } else if (key == "problem.p") {
    c.problem.p = num();
  } else if (key == "grid.s_min") {
    c.solver.grid.s_min = num();
  } else if (key == "grid.s_max") {
    c.solver.grid.s_max = num();
  } else if (key == "grid.points") {
    c.solver.grid.points = parse_int(key, value);
  } else if (key == "time.t0") {
    c.solver.time.t0 = num();
  } else if (key == "time.t1") {
    c.t1 = num();
  } else if (key == "time.dt0") {
    c.solver.time.dt0 = num();
  } else if (key == "time.growth") {
    c.solver.time.growth = num();
  } else if (key == "time.theta") {
    c.solver.time.theta = num();
  } else if (key == "time.window_lo") {
    c.window_lo = num();
  } else if (key == "time.per_decade") {
    c.per_decade = parse_int(key, value);
  } else if (key == "experiment.kind") {
    c.kind = value;
  } else if (key == "experiment.ell") {
    c.ell = num();
  } else if (key == "experiment.b") {
    c.b = num();
  } else if (key == "experiment.k") {
    c.k = num();
  } else if (key == "experiment.tolerance") {
    c.tolerance = num();
  } else if (key == "experiment.r_lo") {
    c.r_lo = num();
  } else if (key == "experiment.r_hi") {
    c.r_hi = num();
  } else if (key == "experiment.rho") {
    c.rho = num();
  } else {
    throw ConfigError("unknown configuration key '" + key + "'");
  }
}

void load_config_into(ExperimentConfig& config, const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) {
    throw ConfigError("config file not found: " + path.string());
  }
  boost::property_tree::ptree tree;
  try {
    boost::property_tree::read_ini(path.string(), tree);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(e.what());
  }
  for (const auto& [section, body] : tree) {
    if (body.empty()) throw ConfigError("setting '" + section + "' is outside a [section]");
    for (const auto& [key, node] : body) {
      apply_setting(config, section + "." + key, node.get_value<std::string>());
    }
  }
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  ExperimentConfig config;
  load_config_into(config, path);
  return config;
}

std::map<std::string, std::string> echo_config(const ExperimentConfig& c) {
  std::map<std::string, std::string> out;
  out["problem.n"] = std::to_string(c.problem.n);
  out["problem.p"] = format(c.problem.p);
  out["grid.s_min"] = format(c.solver.grid.s_min);
  out["grid.s_max"] = format(c.solver.grid.s_max);
  out["grid.points"] = std::to_string(c.solver.grid.points);
  out["time.t0"] = format(c.solver.time.t0);
  out["time.dt0"] = format(c.solver.time.dt0);
  out["time.growth"] = format(c.solver.time.growth);
  out["time.theta"] = format(c.solver.time.theta);
  out["time.per_decade"] = std::to_string(c.per_decade);
  auto opt = [&](const char* key, const std::optional<double>& v) {
    if (v) out[key] = format(*v);
  };
  opt("time.t1", c.t1);
  opt("time.window_lo", c.window_lo);
  if (!c.kind.empty()) out["experiment.kind"] = c.kind;
  opt("experiment.ell", c.ell);
  opt("experiment.b", c.b);
  opt("experiment.k", c.k);
  opt("experiment.tolerance", c.tolerance);
  opt("experiment.r_lo", c.r_lo);
  opt("experiment.r_hi", c.r_hi);
  opt("experiment.rho", c.rho);
  return out;
}

}  // namespace shl
