#pragma once

#include <map>
#include <string>
#include <vector>

namespace diraclab {

/// One row per hbar; named columns keep the CSV schema fixed per diagnostic.
struct SweepRow {
  int N = 0;
  double hbar = 0.0;
  std::map<std::string, double> values;
  bool valid = true;
};

struct Check {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SweepReport {
  std::string diagnostic;
  std::string scenario;
  std::vector<std::string> columns;  // CSV order (after N, hbar)
  std::vector<SweepRow> rows;        // ordered by decreasing hbar
  std::map<std::string, double> summary;
  std::vector<Check> checks;
  std::vector<std::string> notes;

  bool all_passed() const {
    for (const auto& c : checks)
      if (!c.passed) return false;
    return true;
  }
};

/// Least-squares slope of log(value) vs log(hbar) over valid rows with
/// positive values. Returns 0 when fewer than two usable points exist.
double loglog_slope(const SweepReport& rep, const std::string& column);
double loglog_slope(const std::vector<double>& hbars, const std::vector<double>& values);

bool strictly_decreasing(const SweepReport& rep, const std::string& column);

/// Write-temp-then-rename; directories are created as needed.
void atomic_write(const std::string& path, const std::string& content);

std::string to_csv(const SweepReport& rep);
std::string to_json_summary(const SweepReport& rep);
/// Log-log trend plot with the fitted slope annotated.
std::string to_svg(const SweepReport& rep, const std::string& column);

/// Writes <out>/<scenario>_<diagnostic>.{csv,json,svg} for the requested
/// formats ("csv", "json", "svg").
void export_report(const SweepReport& rep, const std::string& out_dir,
                   const std::vector<std::string>& formats);

}  // namespace diraclab
