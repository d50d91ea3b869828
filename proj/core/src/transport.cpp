#include "cmasim/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "cmasim/errors.hpp"

namespace cmasim {

namespace {

// Event times are compared against k*dt; this absorbs the rounding of k*dt so
// an event scheduled exactly on a step boundary is seen at that step.
constexpr double kEventSlack = 1e-9;

// Largest rear position that keeps `length` behind `limit` exactly.
double rear_limit(double limit, double length) {
  double rear = limit - length;
  while (rear + length > limit) {
    rear = std::nextafter(rear, -std::numeric_limits<double>::infinity());
  }
  return rear;
}

void check_bolus_order(std::span<const BeadSpec> beads) {
  for (std::size_t i = 1; i < beads.size(); ++i) {
    if (beads[i].position_mm < beads[i - 1].position_mm) {
      throw InputError("bolus: beads are not sorted by position");
    }
    if (beads[i - 1].front_mm() > beads[i].position_mm) {
      throw InputError("bolus: beads " + std::to_string(i - 1) + " and " + std::to_string(i) +
                       " overlap");
    }
  }
}

}  // namespace

void validate(const TransportParams& p) {
  if (!(p.p_fric_kPa > 0.0)) throw DomainError("transport: p_fric must be positive");
  if (!(p.mobility_mm_s_kPa > 0.0)) throw DomainError("transport: mobility must be positive");
  if (!(p.o_push > 0.0 && p.o_push <= p.o_block && p.o_block <= 1.0)) {
    throw DomainError("transport: need 0 < o_push <= o_block <= 1");
  }
  if (!(p.dt_s > 0.0)) throw DomainError("transport: dt must be positive");
}

std::vector<double> occlusion_profile(std::span<const ActuatorSpec> actuators,
                                      std::span<const double> ratios, std::span<const Cell> grid) {
  if (ratios.size() != actuators.size()) {
    throw InputError("occlusion_profile: one ratio per actuator required");
  }
  std::vector<double> occ(grid.size(), 0.0);
  for (std::size_t a = 0; a < actuators.size(); ++a) {
    const double lo = actuators[a].span_start_mm();
    const double hi = actuators[a].span_end_mm();
    for (std::size_t c = 0; c < grid.size(); ++c) {
      const double mid = grid[c].mid_mm();
      if (mid >= lo && mid <= hi) occ[c] = std::max(occ[c], ratios[a]);
    }
  }
  return occ;
}

std::vector<double> actuator_occlusions(std::span<const ActuatorSpec> actuators,
                                        std::span<const double> cell_occlusion,
                                        std::span<const Cell> grid) {
  std::vector<double> out(actuators.size(), 0.0);
  for (std::size_t a = 0; a < actuators.size(); ++a) {
    const double lo = actuators[a].span_start_mm();
    const double hi = actuators[a].span_end_mm();
    for (std::size_t c = 0; c < grid.size(); ++c) {
      const double mid = grid[c].mid_mm();
      if (mid >= lo && mid <= hi) out[a] = std::max(out[a], cell_occlusion[c]);
    }
  }
  return out;
}

BolusStep bolus_step(std::span<const BeadSpec> beads, std::span<const double> cell_occlusion,
                     std::span<const double> generated_kPa, std::span<const ActuatorSpec> actuators,
                     std::span<const Cell> grid, const TransportParams& params, double dt,
                     const RectumSpec& rectum) {
  check_bolus_order(beads);
  if (generated_kPa.size() != actuators.size()) {
    throw InputError("bolus_step: one generated pressure per actuator required");
  }
  const auto ring_occ = actuator_occlusions(actuators, cell_occlusion, grid);

  std::vector<BeadSpec> moved(beads.begin(), beads.end());
  std::vector<bool> gone(beads.size(), false);
  std::optional<double> ahead_rear;

  for (std::size_t j = beads.size(); j-- > 0;) {
    BeadSpec& bead = moved[j];
    const double rear = bead.position_mm;
    const double front = bead.front_mm();

    double drive = 0.0;
    std::optional<std::size_t> driver;
    for (std::size_t a = 0; a < actuators.size(); ++a) {
      if (ring_occ[a] < params.o_push) continue;
      // Span overlaps the bead, or sits behind its rear within one bead length.
      const bool reaches = actuators[a].span_start_mm() <= front &&
                           actuators[a].span_end_mm() >= rear - bead.length_mm;
      if (reaches && generated_kPa[a] > drive) {
        drive = generated_kPa[a];
        driver = a;
      }
    }

    bool blocked = false;
    for (std::size_t a = 0; a < actuators.size(); ++a) {
      if (driver && *driver == a) continue;
      if (ring_occ[a] >= params.o_block && actuators[a].span_start_mm() > front) {
        blocked = true;
        break;
      }
    }

    const double speed = blocked ? 0.0 : params.mobility_mm_s_kPa * std::max(0.0, drive - params.p_fric_kPa);
    double next = rear + speed * dt;
    if (ahead_rear) next = std::max(rear, std::min(next, rear_limit(*ahead_rear, bead.length_mm)));
    bead.position_mm = next;

    if (bead.position_mm >= rectum.length_mm) {
      gone[j] = true;
    } else {
      ahead_rear = bead.position_mm;
    }
  }

  BolusStep out;
  for (std::size_t j = 0; j < moved.size(); ++j) {
    if (gone[j]) {
      out.expelled.push_back(j);
    } else {
      out.beads.push_back(moved[j]);
    }
  }
  return out;
}

std::vector<BeadSpec> make_default_bolus(const ActuatorSpec& first_ring, const BolusLayout& layout,
                                         const RectumSpec& rectum) {
  if (layout.n_beads < 1) throw DomainError("bolus: need at least one bead");
  if (!(layout.gap_mm >= 0.0)) throw DomainError("bolus: gap must be >= 0");
  std::vector<BeadSpec> beads;
  double rear = first_ring.span_start_mm() - layout.length_mm;
  for (int i = 0; i < layout.n_beads; ++i) {
    beads.push_back(make_bead(layout.length_mm, layout.width_mm, layout.density_g_cm3, rear));
    rear += layout.length_mm + layout.gap_mm;
  }
  if (beads.front().position_mm < 0.0 || beads.back().front_mm() > rectum.length_mm) {
    throw DomainError("bolus: stacked beads do not fit inside the rectum");
  }
  return beads;
}

Scene make_default_scene(const PatternSpec& pattern, double supply_kPa) {
  Scene scene;
  scene.rectum = make_rectum();
  scene.actuators = default_actuators(scene.rectum);
  scene.lines = {{make_line(supply_kPa, 10.0), make_line(supply_kPa, 18.0), make_line(supply_kPa, 18.0)}};
  scene.schedule = compile(pattern);
  scene.bolus = make_default_bolus(scene.actuators[0], BolusLayout{}, scene.rectum);
  return scene;
}

std::int64_t to_micrograms(double grams) { return std::llround(grams * 1e6); }

SimResult run_scenario(const Scene& scene, const RunOptions& options) {
  validate(scene.rectum);
  for (const auto& ring : scene.actuators) validate(ring, scene.rectum);
  validate(scene.response);
  validate(scene.transport);
  if (scene.bolus.empty()) throw InputError("run_scenario: bolus has no beads");
  check_bolus_order(scene.bolus);
  if (!(scene.schedule.total_duration_s > 0.0)) {
    throw InputError("run_scenario: schedule duration must be positive");
  }
  if (scene.decimation < 1) throw DomainError("run_scenario: decimation must be >= 1");
  const double dt = scene.transport.dt_s;
  for (auto label : kAllLabels) {
    const auto& line = scene.lines[label];
    validate(line);
    if (!scene.instant_pneumatics && dt > max_stable_dt(line)) {
      throw ConfigError("run_scenario: transport dt exceeds 0.2 * pneumatic time constant of " +
                        std::string(to_string(label)));
    }
  }

  const auto grid = cell_grid(scene.rectum);
  const double horizon = scene.schedule.total_duration_s;
  const auto schedule_steps = static_cast<std::int64_t>(std::ceil(horizon / dt - 1e-9));
  const std::int64_t cap_steps = 10 * schedule_steps;

  SimResult result;
  result.first_open_s = first_opening(scene.schedule);

  std::vector<BeadSpec> beads = scene.bolus;
  std::vector<std::size_t> ids(beads.size());
  std::vector<double> position_by_id(beads.size());
  std::vector<std::int64_t> mass_by_id(beads.size());
  for (std::size_t i = 0; i < beads.size(); ++i) {
    ids[i] = i;
    position_by_id[i] = beads[i].position_mm;
    mass_by_id[i] = to_micrograms(beads[i].mass_g);
    result.initial_mass_ug += mass_by_id[i];
  }
  std::int64_t expelled_ug = 0;

  PerLabel<ChamberState> chambers{};
  PerLabel<std::size_t> cursor{};
  std::array<double, kNumActuators> ratios{};
  std::array<double, kNumActuators> generated{};
  PerLabel<double> ring_occ{};

  auto record = [&](double t) {
    SimSample s;
    s.t_s = t;
    for (auto label : kAllLabels) {
      s.pressure_kPa[label] = chambers[label].pressure_kPa;
      s.occlusion[label] = ring_occ[label];
    }
    s.bead_position_mm = position_by_id;
    s.expelled_ug = expelled_ug;
    s.in_lumen_ug = result.initial_mass_ug - expelled_ug;
    result.samples.push_back(std::move(s));
  };
  record(0.0);

  std::int64_t step = 0;
  bool stalled = false;
  while (true) {
    const double t = static_cast<double>(step) * dt;

    for (auto label : kAllLabels) {
      const auto& ev = scene.schedule.events[label];
      auto& k = cursor[label];
      while (k < ev.size() && ev[k].time_s <= t + kEventSlack * dt) {
        chambers[label].valve_open = ev[k].open;
        ++k;
      }
      if (scene.instant_pneumatics) {
        const auto& line = scene.lines[label];
        chambers[label].pressure_kPa = chambers[label].valve_open ? line.supply_kPa : line.vent_kPa;
      } else {
        chambers[label] = chamber_step(chambers[label], scene.lines[label], dt);
      }
    }

    for (auto label : kAllLabels) {
      const auto& ring = scene.actuators[index_of(label)];
      const double p = chambers[label].pressure_kPa;
      ratios[index_of(label)] = contraction_response(scene.response, ring.cover, p);
      generated[index_of(label)] = generated_pressure(scene.response, ring.cover, ring.label, p);
    }
    const auto occ = occlusion_profile(scene.actuators, ratios, grid);
    const auto per_ring = actuator_occlusions(scene.actuators, occ, grid);
    for (auto label : kAllLabels) ring_occ[label] = per_ring[index_of(label)];

    auto moved = bolus_step(beads, occ, generated, scene.actuators, grid, scene.transport, dt,
                            scene.rectum);
    ++step;
    const double t_next = static_cast<double>(step) * dt;

    bool any_motion = !moved.expelled.empty();
    std::vector<std::size_t> kept_ids;
    kept_ids.reserve(moved.beads.size());
    std::size_t next_expelled = 0;
    std::size_t kept = 0;
    for (std::size_t j = 0; j < ids.size(); ++j) {
      const std::size_t id = ids[j];
      if (next_expelled < moved.expelled.size() && moved.expelled[next_expelled] == j) {
        ++next_expelled;
        expelled_ug += mass_by_id[id];
        result.expulsions.push_back({id, t_next, mass_by_id[id]});
        result.last_expulsion_s = t_next;
        // Report the bead where it crossed; its mass is now in the expelled ledger.
        position_by_id[id] = std::max(position_by_id[id], scene.rectum.length_mm);
        continue;
      }
      const double pos = moved.beads[kept].position_mm;
      if (pos != position_by_id[id]) any_motion = true;
      position_by_id[id] = pos;
      kept_ids.push_back(id);
      ++kept;
    }
    ids = std::move(kept_ids);
    beads = std::move(moved.beads);

    const bool empty = beads.empty();
    const bool schedule_done = step >= schedule_steps;
    if (empty && (schedule_done || options.stop_when_empty)) {
      result.complete = true;
      break;
    }
    if (schedule_done && !empty) {
      // Past the schedule every valve is closed; once no ring can push any
      // more, nothing will ever move again.
      bool can_push = false;
      for (auto label : kAllLabels) {
        if (ring_occ[label] >= scene.transport.o_push) can_push = true;
      }
      if (!any_motion && !can_push) {
        stalled = true;
        break;
      }
      if (step >= cap_steps) break;
    }
    if (step % scene.decimation == 0) record(t_next);
  }
  (void)stalled;

  if (result.samples.back().t_s != static_cast<double>(step) * dt) {
    record(static_cast<double>(step) * dt);
  }
  result.makespan_s = static_cast<double>(step) * dt;
  result.expelled_total_g = static_cast<double>(expelled_ug) * 1e-6;
  return result;
}

double defecation_velocity(const SimResult& result) {
  if (!result.complete) throw InputError("defecation_velocity: simulation did not complete");
  if (result.expulsions.empty() || !result.last_expulsion_s || !result.first_open_s) return 0.0;
  const double elapsed = *result.last_expulsion_s - *result.first_open_s;
  if (!(elapsed > 0.0)) return 0.0;
  return result.expelled_total_g / elapsed;
}

double scored_velocity(const SimResult& result) {
  if (result.complete) return defecation_velocity(result);
  if (result.expulsions.empty() || !result.first_open_s) return 0.0;
  const double elapsed = result.makespan_s - *result.first_open_s;
  return elapsed > 0.0 ? result.expelled_total_g / elapsed : 0.0;
}

}  // namespace cmasim
