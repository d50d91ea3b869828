#include "cmasim/pneumatics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "cmasim/errors.hpp"

namespace cmasim {

namespace {

// Trims the float noise of horizon/dt so that e.g. 2.0/0.0005 gives 4000 steps.
std::size_t step_count(double horizon_s, double dt) {
  return static_cast<std::size_t>(std::ceil(horizon_s / dt - 1e-9));
}

}  // namespace

double tube_resistance(const PneumaticLine& line) {
  const double r = 0.5 * line.tube_inner_diameter_mm * 1e-3;
  return 8.0 * line.air_viscosity_Pa_s * line.tube_length_m / (std::numbers::pi * r * r * r * r);
}

double chamber_compliance(const PneumaticLine& line) {
  return line.chamber_volume_mL * 1e-6 / kAtmosphericPa;
}

PneumaticLine derive_time_constants(PneumaticLine line) {
  const double tau = tube_resistance(line) * chamber_compliance(line);
  line.tau_fill_s = tau;
  line.tau_vent_s = tau;
  return line;
}

PneumaticLine make_line(double supply_kPa, double chamber_volume_mL) {
  PneumaticLine line;
  line.supply_kPa = supply_kPa;
  line.chamber_volume_mL = chamber_volume_mL;
  line = derive_time_constants(line);
  validate(line);
  return line;
}

void validate(const PneumaticLine& line) {
  if (!(line.supply_kPa >= 0.0)) throw DomainError("supply pressure must be >= 0");
  if (!(line.tube_inner_diameter_mm > 0.0)) throw DomainError("tube diameter must be positive");
  if (!(line.tube_length_m > 0.0)) throw DomainError("tube length must be positive");
  if (!(line.chamber_volume_mL > 0.0)) throw DomainError("chamber volume must be positive");
  if (!(line.air_viscosity_Pa_s > 0.0)) throw DomainError("air viscosity must be positive");
  if (!(line.vent_kPa >= 0.0 && line.vent_kPa <= line.supply_kPa)) {
    throw DomainError("vent pressure must lie in [0, supply]");
  }
  if (!(line.tau_fill_s > 0.0 && line.tau_vent_s > 0.0)) {
    throw DomainError("time constants must be positive");
  }
}

double max_stable_dt(const PneumaticLine& line) {
  return 0.2 * std::min(line.tau_fill_s, line.tau_vent_s);
}

ChamberState chamber_step(const ChamberState& state, const PneumaticLine& line, double dt) {
  if (!(dt > 0.0)) throw ConfigError("chamber_step: dt must be positive");
  if (dt > max_stable_dt(line)) {
    throw ConfigError("chamber_step: dt exceeds 0.2 * min(time constant)");
  }
  const double target = state.valve_open ? line.supply_kPa : line.vent_kPa;
  const double tau = state.valve_open ? line.tau_fill_s : line.tau_vent_s;
  ChamberState next = state;
  next.pressure_kPa = state.pressure_kPa + dt * (target - state.pressure_kPa) / tau;
  next.pressure_kPa = std::clamp(next.pressure_kPa, 0.0, line.supply_kPa);
  return next;
}

std::vector<double> simulate_chamber_trace(const PneumaticLine& line,
                                           std::span<const ValveEvent> timeline,
                                           double horizon_s, double dt) {
  if (!(horizon_s > 0.0)) throw InputError("simulate_chamber_trace: horizon must be positive");
  if (!std::is_sorted(timeline.begin(), timeline.end(),
                      [](const ValveEvent& a, const ValveEvent& b) { return a.time_s < b.time_s; })) {
    throw InputError("simulate_chamber_trace: valve timeline is not sorted by time");
  }
  const std::size_t n = step_count(horizon_s, dt);
  std::vector<double> trace;
  trace.reserve(n + 1);

  ChamberState state;
  std::size_t next_event = 0;
  trace.push_back(state.pressure_kPa);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = static_cast<double>(k) * dt;
    while (next_event < timeline.size() && timeline[next_event].time_s <= t) {
      state.valve_open = timeline[next_event].open;
      ++next_event;
    }
    state = chamber_step(state, line, dt);
    trace.push_back(state.pressure_kPa);
  }
  return trace;
}

}  // namespace cmasim
