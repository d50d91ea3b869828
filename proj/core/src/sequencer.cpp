#include "cmasim/sequencer.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cmasim/csv.hpp"
#include "cmasim/errors.hpp"

namespace cmasim {

std::string_view to_string(PatternKind kind) {
  switch (kind) {
    case PatternKind::Pattern1: return "pattern1";
    case PatternKind::Pattern2: return "pattern2";
    case PatternKind::Custom: return "custom";
  }
  return "?";
}

std::optional<PatternKind> parse_pattern_kind(std::string_view text) {
  if (text == "pattern1" || text == "pattern-1" || text == "1") return PatternKind::Pattern1;
  if (text == "pattern2" || text == "pattern-2" || text == "2") return PatternKind::Pattern2;
  if (text == "custom") return PatternKind::Custom;
  return std::nullopt;
}

void validate(const PatternSpec& spec) {
  if (spec.kind == PatternKind::Custom) return;
  if (!(spec.t_on_s > 0.0)) throw DomainError("pattern: t_on must be positive");
  if (!(spec.t_off_s >= 0.0)) throw DomainError("pattern: t_off must be >= 0");
  if (spec.n_cycles < 1) throw DomainError("pattern: n_cycles must be >= 1");
}

ValveSchedule build_pattern1(double t_on_s, double t_off_s, int n_cycles) {
  validate(PatternSpec{PatternKind::Pattern1, t_on_s, t_off_s, n_cycles, {}, {}});
  const double cycle = 3.0 * t_on_s + t_off_s;
  ValveSchedule schedule;
  for (int k = 0; k < n_cycles; ++k) {
    const double base = k * cycle;
    for (auto label : kAllLabels) {
      auto& ev = schedule.events[label];
      ev.push_back({base + static_cast<double>(index_of(label)) * t_on_s, true});
      ev.push_back({base + 3.0 * t_on_s, false});
    }
  }
  schedule.total_duration_s = n_cycles * cycle;
  return schedule;
}

ValveSchedule build_pattern2(double t_on_s, double t_off_s, int n_cycles) {
  validate(PatternSpec{PatternKind::Pattern2, t_on_s, t_off_s, n_cycles, {}, {}});
  const double slot = t_on_s + t_off_s;
  const double cycle = 3.0 * slot;
  ValveSchedule schedule;
  for (int k = 0; k < n_cycles; ++k) {
    const double base = k * cycle;
    for (auto label : kAllLabels) {
      const double start = base + static_cast<double>(index_of(label)) * slot;
      auto& ev = schedule.events[label];
      ev.push_back({start, true});
      ev.push_back({start + t_on_s, false});
    }
  }
  schedule.total_duration_s = n_cycles * cycle;
  return schedule;
}

ValveSchedule build_custom(const std::vector<TimelineEntry>& timeline, std::optional<double> total_s) {
  std::vector<TimelineEntry> sorted = timeline;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const TimelineEntry& a, const TimelineEntry& b) { return a.time_s < b.time_s; });

  ValveSchedule schedule;
  double last = 0.0;
  for (const auto& e : sorted) {
    if (!(e.time_s >= 0.0) || !std::isfinite(e.time_s)) {
      throw InputError("custom timeline: event times must be finite and >= 0");
    }
    auto& ev = schedule.events[e.label];
    const bool currently_open = !ev.empty() && ev.back().open;
    if (e.open == currently_open) {
      throw InputError("custom timeline: valve " + std::string(to_string(e.label)) +
                       " does not alternate open/close at t=" + csv::format_number(e.time_s));
    }
    ev.push_back({e.time_s, e.open});
    last = std::max(last, e.time_s);
  }
  for (auto label : kAllLabels) {
    const auto& ev = schedule.events[label];
    if (!ev.empty() && ev.back().open) {
      throw InputError("custom timeline: valve " + std::string(to_string(label)) +
                       " is left open at the end");
    }
  }
  if (total_s) {
    if (*total_s < last) throw InputError("custom timeline: total duration precedes the last event");
    last = *total_s;
  }
  schedule.total_duration_s = last;
  return schedule;
}

ValveSchedule compile(const PatternSpec& spec) {
  switch (spec.kind) {
    case PatternKind::Pattern1: return build_pattern1(spec.t_on_s, spec.t_off_s, spec.n_cycles);
    case PatternKind::Pattern2: return build_pattern2(spec.t_on_s, spec.t_off_s, spec.n_cycles);
    case PatternKind::Custom: return build_custom(spec.custom_timeline, spec.custom_total_s);
  }
  throw InputError("unknown pattern kind");
}

PatternSpec equal_on_preset(double t_on_s, double t_off_s, int n_cycles) {
  // Same timing as pattern-2, spelled out as an explicit timeline.
  const auto schedule = build_pattern2(t_on_s, t_off_s, n_cycles);
  PatternSpec spec;
  spec.kind = PatternKind::Custom;
  spec.t_on_s = t_on_s;
  spec.t_off_s = t_off_s;
  spec.n_cycles = n_cycles;
  for (auto label : kAllLabels) {
    for (const auto& e : schedule.events[label]) {
      spec.custom_timeline.push_back({e.time_s, label, e.open});
    }
  }
  std::stable_sort(spec.custom_timeline.begin(), spec.custom_timeline.end(),
                   [](const TimelineEntry& a, const TimelineEntry& b) { return a.time_s < b.time_s; });
  spec.custom_total_s = schedule.total_duration_s;
  return spec;
}

ValveStates valve_state_at(const ValveSchedule& schedule, double time_s) {
  if (!(time_s >= 0.0 && time_s <= schedule.total_duration_s)) {
    throw RangeError("valve_state_at: time " + csv::format_number(time_s) +
                     " outside [0, " + csv::format_number(schedule.total_duration_s) + "]");
  }
  ValveStates states{};
  for (auto label : kAllLabels) {
    const auto& ev = schedule.events[label];
    const auto it = std::upper_bound(ev.begin(), ev.end(), time_s,
                                     [](double t, const ValveEvent& e) { return t < e.time_s; });
    states[label] = it != ev.begin() && std::prev(it)->open;
  }
  return states;
}

std::vector<TimelineEntry> parse_timeline_csv(std::string_view text) {
  const auto doc = csv::parse(text);
  const auto c_time = csv::column(doc, "time_s");
  const auto c_label = csv::column(doc, "label");
  const auto c_open = csv::column(doc, "open");
  std::vector<TimelineEntry> out;
  for (std::size_t i = 0; i < doc.rows.size(); ++i) {
    const auto& f = doc.rows[i];
    const auto line = doc.row_lines[i];
    TimelineEntry e;
    e.time_s = csv::to_double(f[c_time], line, c_time + 1);
    const auto label = parse_label(f[c_label]);
    if (!label) throw ParseError("unknown label '" + f[c_label] + "'", line, c_label + 1);
    e.label = *label;
    if (f[c_open] == "1") {
      e.open = true;
    } else if (f[c_open] == "0") {
      e.open = false;
    } else {
      throw ParseError("open must be 0 or 1, got '" + f[c_open] + "'", line, c_open + 1);
    }
    out.push_back(e);
  }
  return out;
}

std::optional<double> first_opening(const ValveSchedule& schedule) {
  std::optional<double> first;
  for (auto label : kAllLabels) {
    for (const auto& e : schedule.events[label]) {
      if (e.open) {
        if (!first || e.time_s < *first) first = e.time_s;
        break;
      }
    }
  }
  return first;
}

}  // namespace cmasim
