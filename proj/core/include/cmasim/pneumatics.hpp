#pragma once

// Supply chain for one actuator: regulated source, on/off valve, tubing and
// the ring's air chamber. Pressures are gauge kPa (atmosphere = 0).

#include <span>
#include <vector>

namespace cmasim {

inline constexpr double kAtmosphericPa = 101325.0;
inline constexpr double kAirViscosityPaS = 1.81e-5;

struct PneumaticLine {
  double supply_kPa = 10.0;
  double tube_inner_diameter_mm = 2.0;
  double tube_length_m = 1.0;
  double chamber_volume_mL = 10.0;
  double vent_kPa = 0.0;
  double air_viscosity_Pa_s = kAirViscosityPaS;
  /// Filling and venting time constants in seconds. Fill them with
  /// derive_time_constants() or set them directly.
  double tau_fill_s = 0.0;
  double tau_vent_s = 0.0;

  friend bool operator==(const PneumaticLine&, const PneumaticLine&) = default;
};

struct ChamberState {
  double pressure_kPa = 0.0;
  bool valve_open = false;

  friend bool operator==(const ChamberState&, const ChamberState&) = default;
};

/// Valve command: from `time_s` on, the valve is `open`.
struct ValveEvent {
  double time_s = 0.0;
  bool open = false;

  friend bool operator==(const ValveEvent&, const ValveEvent&) = default;
};

/// Laminar Hagen-Poiseuille resistance of the tubing, Pa*s/m^3.
double tube_resistance(const PneumaticLine& line);

/// Isothermal chamber compliance V / p_atm, m^3/Pa.
double chamber_compliance(const PneumaticLine& line);

/// Returns `line` with tau_fill_s = tau_vent_s = R * C.
PneumaticLine derive_time_constants(PneumaticLine line);

/// Line with default tubing, the given chamber volume and derived time constants.
PneumaticLine make_line(double supply_kPa, double chamber_volume_mL);

/// Throws DomainError when a field breaks the line invariants.
void validate(const PneumaticLine& line);

/// Largest dt accepted by chamber_step for this line.
double max_stable_dt(const PneumaticLine& line);

/// One explicit first-order step toward supply (valve open) or vent (closed),
/// clamped to [0, supply]. Throws ConfigError if dt exceeds max_stable_dt.
ChamberState chamber_step(const ChamberState& state, const PneumaticLine& line, double dt);

/// Fixed-step pressure trace starting from an empty chamber. Sample k is at
/// time k*dt; the valve command used for step k is the last event at or before
/// k*dt. Returns ceil(horizon/dt)+1 samples. Throws InputError when the
/// timeline is unsorted or horizon <= 0.
std::vector<double> simulate_chamber_trace(const PneumaticLine& line,
                                           std::span<const ValveEvent> timeline,
                                           double horizon_s, double dt);

}  // namespace cmasim
