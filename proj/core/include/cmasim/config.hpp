#pragma once

// Scenario configuration: JSON in, validated value records out.

#include <cstdint>
#include <string>
#include <string_view>

#include "cmasim/geometry.hpp"
#include "cmasim/mechanics.hpp"
#include "cmasim/sequencer.hpp"
#include "cmasim/transport.hpp"

namespace cmasim {

enum class Experiment { Sweep, Pressure, Patterns, Scenario };

std::string_view to_string(Experiment e);
std::optional<Experiment> parse_experiment(std::string_view text);

struct PneumaticsConfig {
  double supply_kPa = 10.0;
  double tube_inner_diameter_mm = 2.0;
  double tube_length_m = 1.0;
  double vent_kPa = 0.0;
  double air_viscosity_Pa_s = kAirViscosityPaS;
  PerLabel<double> chamber_volume_mL{{10.0, 18.0, 18.0}};
  bool instant = false;

  friend bool operator==(const PneumaticsConfig&, const PneumaticsConfig&) = default;
};

struct RunConfig {
  Experiment experiment = Experiment::Patterns;
  int decimation = 200;
  std::string out_dir = "out";
  /// false replaces every schedule by an all-closed one of the same length.
  bool valves_enabled = true;
  /// Cycles per run in the pattern comparison.
  int pattern_cycles = 8;

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

struct ScenarioConfig {
  RectumSpec rectum = make_rectum();
  Actuators actuators = default_actuators(make_rectum());
  ResponseParams response;
  PneumaticsConfig pneumatics;
  PatternSpec pattern{PatternKind::Pattern1, 1.0, 1.0, 8, {}, {}};
  BolusLayout bolus;
  TransportParams transport;
  RunConfig run;

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

/// Parses and validates a JSON document. Absent fields take their defaults;
/// actuator centres default to fixed fractions of the configured length.
/// Throws ParseError (with line/column) for malformed JSON and ValidationError
/// naming the dotted field path for unknown keys, wrong types and broken
/// invariants.
ScenarioConfig parse_config(std::string_view json_text);

/// Full JSON document (every field written), two-space indented.
std::string serialize_config(const ScenarioConfig& config);

/// Runs every check parse_config applies. Throws ValidationError.
void validate(const ScenarioConfig& config);

/// FNV-1a 64 of the compact canonical serialization, as 16 hex digits.
std::string config_hash(const ScenarioConfig& config);

PneumaticLine make_line(const PneumaticsConfig& pneumatics, ActuatorLabel label);

/// Scene for `pattern` built from the config's geometry, response, lines,
/// bolus and transport records. Honours run.valves_enabled and run.decimation.
Scene make_scene(const ScenarioConfig& config, const PatternSpec& pattern);
Scene make_scene(const ScenarioConfig& config);

}  // namespace cmasim
