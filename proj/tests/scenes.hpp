#pragma once

// Small hand-built scenes shared by unit tests and the acceptance binary.

#include <vector>

#include "cmasim/transport.hpp"
#include "oracles.hpp"

namespace scenes {

// 45 mm lumen split into 3 cells, one bead at the inlet, A1 spanning the
// whole lumen. A2 and A3 exist but never open. Pressure follows the valve
// instantly, so the bead speed is piecewise constant.
struct Toy {
  cmasim::Scene scene;
  std::vector<oracle::Interval> open;
  double speed_mm_s = 0.0;
  double outlet_mm = 45.0;
};

inline Toy toy_three_cell(std::vector<oracle::Interval> open, double total_s) {
  using namespace cmasim;
  Toy toy;
  toy.open = open;
  auto& s = toy.scene;
  s.rectum = make_rectum(toy.outlet_mm, 35.0, 3);
  for (auto label : kAllLabels) {
    auto& ring = s.actuators[index_of(label)];
    ring.label = label;
    ring.cover = CoverType::TypeIII;
    ring.d_inner_mm = kSmallRingInnerMm;
    ring.d_outer_mm = kSmallRingOuterMm;
    ring.height_mm = toy.outlet_mm;
    ring.axial_center_mm = toy.outlet_mm / 2;
  }
  std::vector<TimelineEntry> timeline;
  for (const auto& iv : open) {
    timeline.push_back({iv.start, ActuatorLabel::A1, true});
    timeline.push_back({iv.end, ActuatorLabel::A1, false});
  }
  s.schedule = build_custom(timeline, total_s);
  s.instant_pneumatics = true;
  s.transport.dt_s = 1e-3;
  s.decimation = 1;
  BeadSpec bead;
  bead.length_mm = 15.0;
  bead.width_mm = 8.0;
  bead.mass_g = 0.5;
  bead.position_mm = 0.0;
  s.bolus = {bead};

  const double gen = s.response.kappa[CoverType::TypeIII] * s.response.eta[ActuatorLabel::A1] *
                     s.lines[ActuatorLabel::A1].supply_kPa;
  toy.speed_mm_s = s.transport.mobility_mm_s_kPa * (gen - s.transport.p_fric_kPa);
  return toy;
}

// The four working patterns paired with the measured velocities.
inline std::vector<cmasim::TransportTarget> measured_targets(int n_cycles) {
  const auto patterns = cmasim::working_patterns(n_cycles);
  const double v[] = {0.42, 0.17, 0.22, 0.11};
  std::vector<cmasim::TransportTarget> out;
  for (std::size_t i = 0; i < patterns.size(); ++i) out.push_back({patterns[i], v[i]});
  return out;
}

}  // namespace scenes
