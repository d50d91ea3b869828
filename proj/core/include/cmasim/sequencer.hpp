#pragma once

// Open-loop valve sequencing: declarative patterns compiled into per-valve
// open/close timelines.

#include <optional>
#include <string_view>
#include <vector>

#include "cmasim/geometry.hpp"
#include "cmasim/pneumatics.hpp"

namespace cmasim {

enum class PatternKind { Pattern1, Pattern2, Custom };

std::string_view to_string(PatternKind kind);
/// Accepts "pattern1"/"pattern-1"/"1", "pattern2"/"pattern-2"/"2", "custom".
std::optional<PatternKind> parse_pattern_kind(std::string_view text);

struct TimelineEntry {
  double time_s = 0.0;
  ActuatorLabel label = ActuatorLabel::A1;
  bool open = false;

  friend bool operator==(const TimelineEntry&, const TimelineEntry&) = default;
};

struct PatternSpec {
  PatternKind kind = PatternKind::Pattern1;
  double t_on_s = 1.0;
  double t_off_s = 1.0;
  int n_cycles = 1;
  /// Only used by Custom patterns.
  std::vector<TimelineEntry> custom_timeline;
  /// Custom patterns: schedule length; defaults to the last event time.
  std::optional<double> custom_total_s;

  friend bool operator==(const PatternSpec&, const PatternSpec&) = default;
};

struct ValveSchedule {
  PerLabel<std::vector<ValveEvent>> events;
  double total_duration_s = 0.0;

  friend bool operator==(const ValveSchedule&, const ValveSchedule&) = default;
};

using ValveStates = PerLabel<bool>;

void validate(const PatternSpec& spec);

/// Staggered onset, cumulative hold, simultaneous release. Per cycle of length
/// 3*t_on + t_off: A1 opens at 0, A2 at t_on, A3 at 2*t_on, all close at 3*t_on.
ValveSchedule build_pattern1(double t_on_s, double t_off_s, int n_cycles);

/// Strictly sequential pulses. Per cycle of length 3*(t_on + t_off), valve i
/// (0-based) is open on [i*(t_on+t_off), i*(t_on+t_off) + t_on).
ValveSchedule build_pattern2(double t_on_s, double t_off_s, int n_cycles);

/// Custom timeline. Entries are sorted by time (stable); every valve must
/// alternate open/close starting with open, and end closed. Throws InputError
/// otherwise.
ValveSchedule build_custom(const std::vector<TimelineEntry>& timeline,
                           std::optional<double> total_s = std::nullopt);

/// Dispatches on spec.kind.
ValveSchedule compile(const PatternSpec& spec);

/// Equal ON time for each ring, fired one after another A1 -> A2 -> A3 with
/// t_off between pulses. Literal "each actuator on for t_on" reading of the
/// first pattern, kept as a Custom preset for comparison.
PatternSpec equal_on_preset(double t_on_s = 3.0, double t_off_s = 1.0, int n_cycles = 1);

/// Last event at or before `time_s` for each valve (closed if none). Throws
/// RangeError outside [0, total_duration].
ValveStates valve_state_at(const ValveSchedule& schedule, double time_s);

/// Timeline rows from CSV with columns `time_s,label,open` (open is 0 or 1).
std::vector<TimelineEntry> parse_timeline_csv(std::string_view text);

/// Earliest opening over all valves, or nullopt when nothing ever opens.
std::optional<double> first_opening(const ValveSchedule& schedule);

}  // namespace cmasim
