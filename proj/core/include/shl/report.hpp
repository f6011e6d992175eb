#pragma once

#include <filesystem>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "shl/rate_fit.hpp"

namespace shl {

enum class Verdict { pass, fail, not_applicable, inconclusive };

std::string_view to_string(Verdict verdict);

/// How a Report's verdict is derived from its stored series.
///   slope             |slope - theoretical| <= tolerance and rms <= 0.1
///   slope_at_least    slope >= theoretical
///   vanishing         every stored series non-increasing, final/initial <= tolerance
///   growth_band       series strictly increasing, slope in [0, tolerance * theoretical]
///   unbounded_growth  final >= tolerance * initial
///   nonincreasing     series non-increasing (relative slack 1e-12)
///   bounded_variation max/min of the series <= tolerance
///   checks_only       only the boolean checks count
/// In every rule all entries of `checks` must also hold. A series that is
/// identically zero yields not_applicable.
enum class VerdictRule {
  slope,
  slope_at_least,
  vanishing,
  growth_band,
  unbounded_growth,
  nonincreasing,
  bounded_variation,
  checks_only,
};

std::string_view to_string(VerdictRule rule);
VerdictRule parse_verdict_rule(std::string_view text);

struct Report {
  std::string id;
  std::map<std::string, std::string> parameters;  ///< full effective configuration
  VerdictRule rule = VerdictRule::slope;
  double theoretical = std::numeric_limits<double>::quiet_NaN();
  double tolerance = 0.0;
  double window_lo = 0.0;
  double window_hi = std::numeric_limits<double>::infinity();
  std::optional<RateFit> fit;
  std::map<std::string, double> metrics;
  std::map<std::string, bool> checks;
  /// Verdict when the rule fails; the vanishing rule on power-tail data with
  /// ell = sigma reports inconclusive instead of fail.
  Verdict on_failure = Verdict::fail;
  Verdict verdict = Verdict::fail;
  std::string note;
  Series series;
  std::vector<std::string> series_files;
};

/// Pure function of rule, series, thresholds and checks; refits when needed.
Verdict evaluate(const Report& report, std::optional<RateFit>* fit_out = nullptr);

/// Fills fit and verdict from the stored data.
void finalize(Report& report);

/// Header "t,value[,value2]", 17 significant digits.
std::string series_to_csv(const Series& series);
Series series_from_csv(std::string_view text);

/// JSON text of every report field. The run timestamp lives under
/// "metadata" and is omitted when include_metadata is false.
std::string report_to_json(const Report& report, bool include_metadata = true);
Report report_from_json(std::string_view text, const Series& series);

/// Writes <dir>/<id>_series.csv and <dir>/<id>_report.json, each through a
/// temporary file and a rename. Records the file names in series_files.
void write_report(Report& report, const std::filesystem::path& dir);

/// Writes text to path via path.tmp + rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view text);

}  // namespace shl
