#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome shl_run(std::vector<std::string> args) {
  args.insert(args.begin(), "shl");
  std::ostringstream out, err;
  const int code = shl::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch_dir(const std::string& name) {
  const char* base = std::getenv("SHL_TEST_TMP");
  fs::path dir = fs::path(base ? base : fs::temp_directory_path().string()) / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

json read_json(const fs::path& path) {
  std::ifstream in(path);
  return json::parse(in);
}

}  // namespace

TEST_CASE("exponents subcommand") {
  const Outcome o = shl_run({"exponents", "--n", "11", "--p", "7"});
  REQUIRE(o.code == 0);
  const json j = json::parse(o.out);
  CHECK(j.at("sigma").get<double>() == doctest::Approx(13.0 / 3.0));
  CHECK(j.at("m").get<double>() == doctest::Approx(1.0 / 3.0));
  CHECK(j.at("branch").get<std::string>() == "JL_branch");
}

TEST_CASE("usage errors exit with 2") {
  CHECK(shl_run({}).code == 2);
  CHECK(shl_run({"bogus"}).code == 2);
  CHECK(shl_run({"exponents", "--n", "11", "--p", "1.1"}).code == 2);
  CHECK(shl_run({"exponents", "--frobnicate"}).code == 2);
  CHECK(shl_run({"nonlinear-decay", "--data", "power-tail", "--ell", "7"}).code == 2);
  CHECK(shl_run({"linear-decay", "--set", "grid.nothing=1"}).code == 2);
  CHECK(shl_run({"linear-decay", "--config", "/nonexistent/shl.cfg"}).code == 2);
  const Outcome bad = shl_run({"nonlinear-decay", "--data", "power-tail", "--ell", "0.2"});
  CHECK(bad.code == 2);
  CHECK_FALSE(bad.err.empty());
}

TEST_CASE("help exits with 0") { CHECK(shl_run({"--help"}).code == 0); }

TEST_CASE("config, settings and flags are layered into the report") {
  const fs::path dir = scratch_dir("cli_layers");
  {
    std::ofstream cfg(dir / "run.cfg");
    cfg << "[grid]\npoints = 768\n\n[experiment]\nell = 4.5\nb = 0.05\n";
  }
  const Outcome o = shl_run({"linear-decay", "--config", (dir / "run.cfg").string(), "--set",
                             "experiment.b=0.07", "--ell", "5", "--output-dir", (dir / "out").string()});
  CHECK(o.code == 0);
  CHECK(o.out.find("PASS") != std::string::npos);
  std::vector<fs::path> reports;
  for (const auto& entry : fs::directory_iterator(dir / "out")) {
    if (entry.path().string().ends_with("_report.json")) reports.push_back(entry.path());
  }
  REQUIRE(reports.size() == 1);
  const json j = read_json(reports.front());
  const auto params = j.at("parameters");
  CHECK(params.at("grid.points").get<std::string>() == "768");
  CHECK(params.at("experiment.b").get<std::string>() == "0.070000000000000007");
  CHECK(params.at("experiment.ell").get<std::string>() == "5");
  CHECK(j.at("verdict").get<std::string>() == "PASS");
}

TEST_CASE("steady-state writes profile and summary") {
  const fs::path dir = scratch_dir("cli_steady");
  const Outcome o =
      shl_run({"steady-state", "--n", "11", "--p", "7", "--r-max", "50", "--output-dir", dir.string()});
  REQUIRE(o.code == 0);
  const json j = read_json(dir / "steady_state_summary.json");
  CHECK(j.at("ordering").get<std::string>() == "below");
  std::ifstream csv(dir / "steady_state_profile.csv");
  std::string header;
  std::getline(csv, header);
  CHECK(header == "r,value");
}
