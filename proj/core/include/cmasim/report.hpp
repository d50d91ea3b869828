#pragma once

// Tabular experiment output and its CSV rendering.

#include <string>
#include <variant>
#include <vector>

namespace cmasim {

using ReportValue = std::variant<std::string, double>;

struct Provenance {
  std::string config_hash;
  std::string tool_version;

  friend bool operator==(const Provenance&, const Provenance&) = default;
};

/// Which columns a chart should draw. `group` splits rows into series (empty
/// means one series per entry of `y`); bar charts label each bar with `x`.
struct ChartHint {
  std::string group;
  std::string x;
  std::vector<std::string> y;

  friend bool operator==(const ChartHint&, const ChartHint&) = default;
};

struct ExperimentReport {
  std::string id;
  std::vector<std::string> columns;
  std::vector<std::vector<ReportValue>> rows;
  Provenance provenance;
  ChartHint chart;

  /// Index of `name` in columns; throws InputError if absent.
  std::size_t column(const std::string& name) const;

  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

/// Header row then one line per row, LF endings, numbers via csv::format_number.
std::string to_csv(const ExperimentReport& report);

/// Version string compiled into the library.
std::string tool_version();

}  // namespace cmasim
