#pragma once

// Experiment runners. Each returns a report whose provenance carries the
// config hash and tool version.

#include <vector>

#include "cmasim/config.hpp"
#include "cmasim/report.hpp"
#include "cmasim/svg.hpp"
#include "cmasim/transport.hpp"

namespace cmasim {

/// Contraction ratio of every cover type at 0, 2, ..., 20 kPa.
/// CSV `cover,p_in_kPa,ratio`.
ExperimentReport exp_contraction_sweep(const ScenarioConfig& config);

/// Generated pressure of every cover type on rings A1 and A2 at 10 kPa.
/// CSV `cover,label,gen_kPa`.
ExperimentReport exp_generated_pressure(const ScenarioConfig& config);

struct PatternRun {
  PatternSpec pattern;
  SimResult result;
};

/// The four working patterns at the configured supply, run concurrently.
std::vector<PatternRun> run_working_patterns(const ScenarioConfig& config);

/// CSV `pattern,t_on_s,velocity_gps,expelled_g,makespan_s,complete`.
/// Incomplete runs report the lower-bound velocity and complete = 0.
ExperimentReport exp_patterns(const ScenarioConfig& config);
ExperimentReport patterns_report(const ScenarioConfig& config, const std::vector<PatternRun>& runs);

/// Time series of the configured pattern: pressures, occlusions, mass ledger
/// and bead positions, one row per recorded sample.
ExperimentReport exp_scenario(const ScenarioConfig& config);
ExperimentReport scenario_report(const ScenarioConfig& config, const SimResult& result);

ExperimentReport run_experiment(const ScenarioConfig& config, Experiment experiment);

/// Chart kind used for each experiment's SVG.
ChartKind chart_kind(Experiment experiment);

/// True when some row of a patterns or scenario report has complete == 0.
bool has_incomplete_rows(const ExperimentReport& report);

}  // namespace cmasim
