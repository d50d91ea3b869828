#include <algorithm>
#include <array>
#include <cmath>
#include <future>
#include <string>

#include "cmasim/csv.hpp"
#include "cmasim/errors.hpp"
#include "cmasim/transport.hpp"

namespace cmasim {

namespace {

constexpr double kPatternOffTimeS = 1.0;

double largest_generated_pressure(const Scene& scene) {
  double top = 0.0;
  for (const auto& ring : scene.actuators) {
    const double supply = scene.lines[ring.label].supply_kPa;
    top = std::max(top, generated_pressure(scene.response, ring.cover, ring.label, supply));
  }
  return top;
}

double sum_squared_error(std::span<const TransportTarget> targets, std::span<const double> v) {
  double sum = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const double r = v[i] - targets[i].velocity_gps;
    sum += r * r;
  }
  return sum;
}

}  // namespace

std::vector<double> simulate_targets(std::span<const TransportTarget> targets,
                                     const Scene& scene_template, const TransportParams& params) {
  auto one = [&](const TransportTarget& target) {
    Scene scene = scene_template;
    scene.schedule = compile(target.pattern);
    scene.transport = params;
    return scored_velocity(run_scenario(scene, RunOptions{.stop_when_empty = true}));
  };
  std::vector<std::future<double>> jobs;
  jobs.reserve(targets.size());
  for (const auto& t : targets) jobs.push_back(std::async(std::launch::async, one, std::cref(t)));
  std::vector<double> out;
  out.reserve(targets.size());
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

TransportFit calibrate_transport(std::span<const TransportTarget> targets, const Scene& scene_template,
                                 const TransportCalibrationOptions& options) {
  if (targets.size() < 2) throw InputError("calibrate_transport: need at least two targets");
  if (options.max_sweeps < 1 || options.grid_half_width < 1) {
    throw InputError("calibrate_transport: budget and grid width must be >= 1");
  }
  const double p_max = largest_generated_pressure(scene_template);
  if (!(p_max > 0.0)) throw CalibrationError("calibrate_transport: no ring generates any pressure");

  // x[0] = p_fric (kPa), x[1] = log2(mobility)
  std::array<double, 2> x{scene_template.transport.p_fric_kPa,
                          std::log2(scene_template.transport.mobility_mm_s_kPa)};
  std::array<double, 2> step{options.p_fric_step_fraction * p_max, options.log2_mobility_step};
  const std::array<double, 2> min_step{options.min_p_fric_step, options.min_log2_mobility_step};

  auto params_at = [&](const std::array<double, 2>& c) {
    TransportParams p = scene_template.transport;
    p.p_fric_kPa = c[0];
    p.mobility_mm_s_kPa = std::exp2(c[1]);
    return p;
  };
  auto feasible = [&](const std::array<double, 2>& c) { return c[0] > 0.0 && c[0] < p_max; };

  TransportFit fit;
  bool any_motion = false;
  auto evaluate = [&](const std::array<double, 2>& c) {
    auto v = simulate_targets(targets, scene_template, params_at(c));
    ++fit.evaluations;
    for (double vi : v) {
      if (vi > 0.0) any_motion = true;
    }
    return v;
  };

  if (!feasible(x)) {
    throw CalibrationError("calibrate_transport: initial p_fric must lie in (0, " +
                           csv::format_number(p_max) + ")");
  }
  fit.velocities = evaluate(x);
  fit.objective_initial = sum_squared_error(targets, fit.velocities);
  double best = fit.objective_initial;

  for (int sweep = 0; sweep < options.max_sweeps && best > 0.0; ++sweep) {
    bool improved = false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      auto best_x = x;
      for (int k = -options.grid_half_width; k <= options.grid_half_width; ++k) {
        if (k == 0) continue;
        auto trial = x;
        trial[i] += k * step[i];
        if (!feasible(trial)) continue;
        auto v = evaluate(trial);
        const double f = sum_squared_error(targets, v);
        if (f < best) {
          best = f;
          best_x = trial;
          fit.velocities = std::move(v);
        }
      }
      if (best_x != x) {
        x = best_x;
        improved = true;
      }
    }
    fit.history.push_back(best);
    if (!improved) {
      bool any_left = false;
      for (std::size_t i = 0; i < x.size(); ++i) {
        step[i] *= 0.5;
        if (step[i] >= min_step[i]) any_left = true;
      }
      if (!any_left) break;
    }
  }

  if (!any_motion) {
    throw CalibrationError("calibrate_transport: every evaluated point left all beads in place");
  }
  fit.params = params_at(x);
  fit.objective_final = best;
  return fit;
}

std::vector<TransportTarget> parse_targets_csv(std::string_view text, int n_cycles) {
  const auto doc = csv::parse(text);
  const auto c_pattern = csv::column(doc, "pattern");
  const auto c_t = csv::column(doc, "t_on_s");
  const auto c_v = csv::column(doc, "velocity_gps");
  std::vector<TransportTarget> out;
  for (std::size_t i = 0; i < doc.rows.size(); ++i) {
    const auto& f = doc.rows[i];
    const auto line = doc.row_lines[i];
    const auto kind = parse_pattern_kind(f[c_pattern]);
    if (!kind || *kind == PatternKind::Custom) {
      throw ParseError("pattern must be pattern1 or pattern2, got '" + f[c_pattern] + "'", line,
                       c_pattern + 1);
    }
    TransportTarget t;
    t.pattern = PatternSpec{*kind, csv::to_double(f[c_t], line, c_t + 1), kPatternOffTimeS, n_cycles, {}, {}};
    t.velocity_gps = csv::to_double(f[c_v], line, c_v + 1);
    if (t.velocity_gps < 0.0) {
      throw InputError("targets line " + std::to_string(line) + ": negative velocity");
    }
    validate(t.pattern);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<PatternSpec> working_patterns(int n_cycles) {
  return {
      PatternSpec{PatternKind::Pattern1, 1.0, kPatternOffTimeS, n_cycles, {}, {}},
      PatternSpec{PatternKind::Pattern2, 1.0, kPatternOffTimeS, n_cycles, {}, {}},
      PatternSpec{PatternKind::Pattern1, 2.0, kPatternOffTimeS, n_cycles, {}, {}},
      PatternSpec{PatternKind::Pattern1, 3.0, kPatternOffTimeS, n_cycles, {}, {}},
  };
}

}  // namespace cmasim
