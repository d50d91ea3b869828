// Micro and end-to-end timings for the hot paths.

#include <benchmark/benchmark.h>

#include "cmasim/config.hpp"
#include "cmasim/mechanics.hpp"
#include "cmasim/pneumatics.hpp"
#include "cmasim/transport.hpp"

using namespace cmasim;

namespace {

void BM_ChamberStep(benchmark::State& state) {
  const auto line = make_line(10.0, 18.0);
  ChamberState s{0.0, true};
  for (auto _ : state) {
    s = chamber_step(s, line, 5e-4);
    if (s.pressure_kPa > 9.99) s.pressure_kPa = 0.0;
    benchmark::DoNotOptimize(s);
  }
}
BENCHMARK(BM_ChamberStep);

void BM_ChamberTrace(benchmark::State& state) {
  const auto line = make_line(10.0, 10.0);
  const std::vector<ValveEvent> timeline{{0.0, true}, {1.0, false}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(simulate_chamber_trace(line, timeline, 2.0, 5e-4));
  }
}
BENCHMARK(BM_ChamberTrace);

void BM_OcclusionProfile(benchmark::State& state) {
  const auto scene = make_scene(ScenarioConfig{});
  const auto grid = cell_grid(scene.rectum);
  const std::vector<double> ratios{0.9, 0.5, 0.2};
  for (auto _ : state) {
    benchmark::DoNotOptimize(occlusion_profile(scene.actuators, ratios, grid));
  }
}
BENCHMARK(BM_OcclusionProfile);

// One full working-pattern run; the argument indexes working_patterns().
void BM_RunScenario(benchmark::State& state) {
  ScenarioConfig cfg;
  const auto pattern = working_patterns(cfg.run.pattern_cycles).at(static_cast<std::size_t>(state.range(0)));
  const auto scene = make_scene(cfg, pattern);
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_scenario(scene));
  }
}
BENCHMARK(BM_RunScenario)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

void BM_ParseConfig(benchmark::State& state) {
  const std::string text = serialize_config(ScenarioConfig{});
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_config(text));
  }
}
BENCHMARK(BM_ParseConfig);

void BM_CalibrateResponse(benchmark::State& state) {
  ResponseParams truth;
  truth.gamma = {{1.7, 2.3, 2.6}};
  truth.kappa = {{0.42, 0.61, 0.87}};
  MeasurementTable table;
  for (auto c : kAllCovers) {
    for (auto l : {ActuatorLabel::A1, ActuatorLabel::A2}) {
      for (int k = 1; k <= 10; ++k) {
        const double p = 2.0 * k;
        table.rows.push_back({c, l, p, contraction_response(truth, c, p), generated_pressure(truth, c, l, p)});
      }
    }
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(calibrate_response(table, ResponseParams{}));
  }
}
BENCHMARK(BM_CalibrateResponse)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
