#pragma once

// One-dimensional quasi-static bead transport along the lumen. Contracted rings
// push beads distally with a friction-threshold / linear-mobility law; a
// strongly contracted ring ahead of a bead seals the lumen.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "cmasim/geometry.hpp"
#include "cmasim/mechanics.hpp"
#include "cmasim/pneumatics.hpp"
#include "cmasim/sequencer.hpp"

namespace cmasim {

struct TransportParams {
  /// Drive pressure a bead must exceed before it moves, kPa.
  double p_fric_kPa = 1.0;
  /// Bead speed per kPa of excess drive, mm/s/kPa.
  double mobility_mm_s_kPa = 5.0;
  /// Occlusion at which a ring pushes beads.
  double o_push = 0.2;
  /// Occlusion at which a ring ahead of a bead seals the lumen.
  double o_block = 0.3;
  double dt_s = 0.0005;

  friend bool operator==(const TransportParams&, const TransportParams&) = default;
};

/// Throws DomainError unless every field is positive and 0 < o_push <= o_block <= 1.
void validate(const TransportParams& params);

using Actuators = std::array<ActuatorSpec, kNumActuators>;

/// Per-cell occlusion: the ratio of the ring whose span covers the cell
/// midpoint (maximum when spans overlap), 0 elsewhere.
std::vector<double> occlusion_profile(std::span<const ActuatorSpec> actuators,
                                      std::span<const double> ratios,
                                      std::span<const Cell> grid);

/// Occlusion seen by each ring: the largest cell occlusion among cells whose
/// midpoint lies within the ring's span.
std::vector<double> actuator_occlusions(std::span<const ActuatorSpec> actuators,
                                        std::span<const double> cell_occlusion,
                                        std::span<const Cell> grid);

struct BolusStep {
  /// Beads still in the lumen, in input order.
  std::vector<BeadSpec> beads;
  /// Indices (into the input) of beads whose rear reached the outlet.
  std::vector<std::size_t> expelled;
};

/// Advances every bead by one step, distal bead first. Input beads must be
/// sorted by position and must not overlap (InputError otherwise).
BolusStep bolus_step(std::span<const BeadSpec> beads, std::span<const double> cell_occlusion,
                     std::span<const double> generated_kPa, std::span<const ActuatorSpec> actuators,
                     std::span<const Cell> grid, const TransportParams& params, double dt,
                     const RectumSpec& rectum);

struct BolusLayout {
  int n_beads = 5;
  double length_mm = 17.5;
  double width_mm = 8.5;
  double density_g_cm3 = kDefaultBeadDensity;
  double gap_mm = 2.0;

  friend bool operator==(const BolusLayout&, const BolusLayout&) = default;
};

/// Identical beads stacked distally with `gap_mm` between them, the rearmost
/// bead starting one bead length proximal of A1's span (the farthest point A1
/// can still push from).
std::vector<BeadSpec> make_default_bolus(const ActuatorSpec& first_ring, const BolusLayout& layout,
                                         const RectumSpec& rectum);

struct Scene {
  RectumSpec rectum = make_rectum();
  Actuators actuators = default_actuators(make_rectum());
  ResponseParams response;
  PerLabel<PneumaticLine> lines{{make_line(10.0, 10.0), make_line(10.0, 18.0), make_line(10.0, 18.0)}};
  ValveSchedule schedule;
  std::vector<BeadSpec> bolus;
  TransportParams transport;
  /// Chamber pressure jumps to supply/vent with the valve (no RC lag).
  bool instant_pneumatics = false;
  /// Record one sample every `decimation` steps (plus the first and last).
  int decimation = 200;
};

/// Scene with default geometry, lines and bolus, running `pattern` at `supply_kPa`.
Scene make_default_scene(const PatternSpec& pattern, double supply_kPa = 10.0);

struct SimSample {
  double t_s = 0.0;
  PerLabel<double> pressure_kPa{};
  PerLabel<double> occlusion{};
  /// Rear position of every initial bead, by initial index. Expelled beads keep
  /// their final position.
  std::vector<double> bead_position_mm;
  /// Mass ledger in micrograms so that conservation is exact.
  std::int64_t expelled_ug = 0;
  std::int64_t in_lumen_ug = 0;
};

struct Expulsion {
  std::size_t bead = 0;
  double t_s = 0.0;
  std::int64_t mass_ug = 0;
};

struct SimResult {
  std::vector<SimSample> samples;
  std::vector<Expulsion> expulsions;
  std::int64_t initial_mass_ug = 0;
  double expelled_total_g = 0.0;
  double makespan_s = 0.0;
  bool complete = false;
  std::optional<double> first_open_s;
  std::optional<double> last_expulsion_s;
};

struct RunOptions {
  /// End as soon as the lumen is empty instead of running out the schedule.
  /// Expulsion times, and therefore the defecation velocity, are unchanged.
  bool stop_when_empty = false;
};

/// Fixed-step coupled simulation: chamber pressures, ring response, occlusion,
/// bead transport. Runs until the schedule has ended and the lumen is empty.
/// If beads remain and can no longer move, or 10x the schedule duration
/// passes, the result is returned with complete == false.
SimResult run_scenario(const Scene& scene, const RunOptions& options = {});

std::int64_t to_micrograms(double grams);

/// Expelled mass / (last expulsion - first valve opening), 0 when nothing left.
/// Throws InputError for an incomplete result.
double defecation_velocity(const SimResult& result);

/// defecation_velocity for complete runs. For incomplete runs, the expelled
/// mass over the whole run time after the first opening (a lower bound).
double scored_velocity(const SimResult& result);

// Calibration of (p_fric, mobility) against measured defecation velocities.

struct TransportTarget {
  PatternSpec pattern;
  double velocity_gps = 0.0;
};

struct TransportCalibrationOptions {
  int max_sweeps = 10;
  int grid_half_width = 2;
  /// Initial p_fric step as a fraction of the largest generated pressure.
  double p_fric_step_fraction = 0.125;
  /// Initial multiplicative mobility step (log2 units).
  double log2_mobility_step = 1.0;
  double min_p_fric_step = 1e-3;
  double min_log2_mobility_step = 1e-3;
};

struct TransportFit {
  TransportParams params;
  double objective_initial = 0.0;
  double objective_final = 0.0;
  std::vector<double> history;
  std::vector<double> velocities;
  int evaluations = 0;
};

/// Simulated velocity for each target using `params` on `scene_template`.
std::vector<double> simulate_targets(std::span<const TransportTarget> targets,
                                     const Scene& scene_template, const TransportParams& params);

/// Shrinking-grid coordinate descent over p_fric (additive steps) and mobility
/// (multiplicative steps), minimising the summed squared velocity error.
/// Traversal order and budget are fixed, so the result is deterministic.
/// Throws InputError for fewer than two targets and CalibrationError when every
/// evaluated point produced zero velocity for every target.
TransportFit calibrate_transport(std::span<const TransportTarget> targets,
                                 const Scene& scene_template,
                                 const TransportCalibrationOptions& options = {});

/// Reads `pattern,t_on_s,velocity_gps`. Off time is 1 s for both patterns.
std::vector<TransportTarget> parse_targets_csv(std::string_view text, int n_cycles);

/// The four working patterns compared in the defecation experiments:
/// pattern-1 at t=1 s, pattern-2, pattern-1 at t=2 s, pattern-1 at t=3 s.
std::vector<PatternSpec> working_patterns(int n_cycles);

}  // namespace cmasim
