#include "cmasim/experiments.hpp"

#include <algorithm>
#include <future>
#include <string>

#include "cmasim/errors.hpp"

namespace cmasim {

namespace {

constexpr double kSweepMaxKPa = 20.0;
constexpr int kSweepSteps = 10;
constexpr double kComparisonPressureKPa = 10.0;

ExperimentReport start(const ScenarioConfig& config, Experiment e) {
  ExperimentReport r;
  r.id = std::string(to_string(e));
  r.provenance = {config_hash(config), tool_version()};
  return r;
}

}  // namespace

ExperimentReport exp_contraction_sweep(const ScenarioConfig& config) {
  auto r = start(config, Experiment::Sweep);
  r.columns = {"cover", "p_in_kPa", "ratio"};
  r.chart = {"cover", "p_in_kPa", {"ratio"}};
  for (auto cover : kAllCovers) {
    for (int k = 0; k <= kSweepSteps; ++k) {
      const double p = kSweepMaxKPa * k / kSweepSteps;
      r.rows.push_back({std::string(to_string(cover)), p, contraction_response(config.response, cover, p)});
    }
  }
  return r;
}

ExperimentReport exp_generated_pressure(const ScenarioConfig& config) {
  auto r = start(config, Experiment::Pressure);
  r.columns = {"cover", "label", "gen_kPa"};
  r.chart = {"label", "cover", {"gen_kPa"}};
  for (auto label : {ActuatorLabel::A1, ActuatorLabel::A2}) {
    for (auto cover : kAllCovers) {
      r.rows.push_back({std::string(to_string(cover)), std::string(to_string(label)),
                        generated_pressure(config.response, cover, label, kComparisonPressureKPa)});
    }
  }
  return r;
}

std::vector<PatternRun> run_working_patterns(const ScenarioConfig& config) {
  const auto patterns = working_patterns(config.run.pattern_cycles);
  std::vector<std::future<SimResult>> jobs;
  for (const auto& p : patterns) {
    jobs.push_back(std::async(std::launch::async, [&config, p] { return run_scenario(make_scene(config, p)); }));
  }
  std::vector<PatternRun> runs;
  for (std::size_t i = 0; i < patterns.size(); ++i) runs.push_back({patterns[i], jobs[i].get()});
  return runs;
}

ExperimentReport patterns_report(const ScenarioConfig& config, const std::vector<PatternRun>& runs) {
  auto r = start(config, Experiment::Patterns);
  r.columns = {"pattern", "t_on_s", "velocity_gps", "expelled_g", "makespan_s", "complete"};
  r.chart = {"pattern", "t_on_s", {"velocity_gps"}};
  for (const auto& run : runs) {
    r.rows.push_back({std::string(to_string(run.pattern.kind)), run.pattern.t_on_s, scored_velocity(run.result),
                      run.result.expelled_total_g, run.result.makespan_s, run.result.complete ? 1.0 : 0.0});
  }
  return r;
}

ExperimentReport exp_patterns(const ScenarioConfig& config) {
  return patterns_report(config, run_working_patterns(config));
}

ExperimentReport scenario_report(const ScenarioConfig& config, const SimResult& result) {
  auto r = start(config, Experiment::Scenario);
  r.columns = {"t_s"};
  for (auto l : kAllLabels) r.columns.push_back("p_" + std::string(to_string(l)) + "_kPa");
  for (auto l : kAllLabels) r.columns.push_back("occ_" + std::string(to_string(l)));
  r.columns.insert(r.columns.end(), {"expelled_g", "in_lumen_g"});
  const std::size_t n_beads = result.samples.empty() ? 0 : result.samples.front().bead_position_mm.size();
  for (std::size_t b = 0; b < n_beads; ++b) r.columns.push_back("bead" + std::to_string(b) + "_mm");
  r.columns.push_back("complete");
  r.chart = {"", "t_s", {"p_A1_kPa", "p_A2_kPa", "p_A3_kPa"}};

  const double complete = result.complete ? 1.0 : 0.0;
  for (const auto& s : result.samples) {
    std::vector<ReportValue> row{s.t_s};
    for (auto l : kAllLabels) row.emplace_back(s.pressure_kPa[l]);
    for (auto l : kAllLabels) row.emplace_back(s.occlusion[l]);
    row.emplace_back(static_cast<double>(s.expelled_ug) * 1e-6);
    row.emplace_back(static_cast<double>(s.in_lumen_ug) * 1e-6);
    for (double x : s.bead_position_mm) row.emplace_back(x);
    row.emplace_back(complete);
    r.rows.push_back(std::move(row));
  }
  return r;
}

ExperimentReport exp_scenario(const ScenarioConfig& config) {
  return scenario_report(config, run_scenario(make_scene(config)));
}

ExperimentReport run_experiment(const ScenarioConfig& config, Experiment experiment) {
  switch (experiment) {
    case Experiment::Sweep: return exp_contraction_sweep(config);
    case Experiment::Pressure: return exp_generated_pressure(config);
    case Experiment::Patterns: return exp_patterns(config);
    case Experiment::Scenario: return exp_scenario(config);
  }
  throw InputError("unknown experiment");
}

ChartKind chart_kind(Experiment experiment) {
  switch (experiment) {
    case Experiment::Pressure:
    case Experiment::Patterns: return ChartKind::Bar;
    default: return ChartKind::Line;
  }
}

bool has_incomplete_rows(const ExperimentReport& report) {
  const auto it = std::find(report.columns.begin(), report.columns.end(), "complete");
  if (it == report.columns.end()) return false;
  const auto c = static_cast<std::size_t>(it - report.columns.begin());
  for (const auto& row : report.rows) {
    if (const auto* d = std::get_if<double>(&row[c]); d && *d == 0.0) return true;
  }
  return false;
}

}  // namespace cmasim
