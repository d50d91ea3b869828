#include "cmasim/report.hpp"

#include <algorithm>

#include "cmasim/csv.hpp"
#include "cmasim/errors.hpp"

#ifndef CMASIM_VERSION
#define CMASIM_VERSION "0.0.0"
#endif

namespace cmasim {

std::size_t ExperimentReport::column(const std::string& name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) throw InputError("report " + id + " has no column '" + name + "'");
  return static_cast<std::size_t>(it - columns.begin());
}

std::string to_csv(const ExperimentReport& report) {
  std::string out = csv::join(report.columns) + "\n";
  for (const auto& row : report.rows) {
    std::vector<std::string> fields;
    fields.reserve(row.size());
    for (const auto& v : row) {
      if (const auto* s = std::get_if<std::string>(&v)) {
        fields.push_back(*s);
      } else {
        fields.push_back(csv::format_number(std::get<double>(v)));
      }
    }
    out += csv::join(fields) + "\n";
  }
  return out;
}

std::string tool_version() { return CMASIM_VERSION; }

}  // namespace cmasim
