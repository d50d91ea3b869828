#pragma once

#include <string>

#include "cmasim/report.hpp"

namespace cmasim {

enum class ChartKind { Line, Bar };

/// Self-contained SVG of `report` using its chart hint. Line charts draw one
/// polyline plus one circle per row for each series; bar charts draw exactly
/// one <rect> per row (the first y column). Throws InputError for an empty
/// report or non-numeric plotted columns.
std::string emit_svg(const ExperimentReport& report, ChartKind kind);

}  // namespace cmasim
