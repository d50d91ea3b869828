#include "cmasim/config.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <string>

#include <nlohmann/json.hpp>

#include "cmasim/errors.hpp"

namespace cmasim {

using nlohmann::json;

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::Sweep: return "sweep";
    case Experiment::Pressure: return "pressure";
    case Experiment::Patterns: return "patterns";
    case Experiment::Scenario: return "scenario";
  }
  return "?";
}

std::optional<Experiment> parse_experiment(std::string_view text) {
  for (auto e : {Experiment::Sweep, Experiment::Pressure, Experiment::Patterns, Experiment::Scenario}) {
    if (text == to_string(e)) return e;
  }
  return std::nullopt;
}

namespace {

std::string join_path(const std::string& parent, std::string_view key) {
  return parent.empty() ? std::string(key) : parent + "." + std::string(key);
}

// Walks one JSON object, reading known keys and rejecting the rest on finish().
class Section {
 public:
  Section(const json& node, std::string path) : node_(node), path_(std::move(path)) {
    if (!node_.is_object()) throw ValidationError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  const std::string& path() const { return path_; }

  const json* get(const char* key) {
    seen_.insert(key);
    auto it = node_.find(key);
    return it == node_.end() ? nullptr : &*it;
  }

  std::string child(std::string_view key) const { return join_path(path_, key); }

  void number(const char* key, double& out) {
    if (auto* v = get(key)) {
      if (!v->is_number()) throw ValidationError(child(key), "expected a number");
      out = v->get<double>();
    }
  }

  void integer(const char* key, int& out) {
    if (auto* v = get(key)) {
      if (!v->is_number_integer()) throw ValidationError(child(key), "expected an integer");
      const auto x = v->get<std::int64_t>();
      if (x < -1'000'000'000 || x > 1'000'000'000) throw ValidationError(child(key), "integer out of range");
      out = static_cast<int>(x);
    }
  }

  void boolean(const char* key, bool& out) {
    if (auto* v = get(key)) {
      if (!v->is_boolean()) throw ValidationError(child(key), "expected true or false");
      out = v->get<bool>();
    }
  }

  void string(const char* key, std::string& out) {
    if (auto* v = get(key)) {
      if (!v->is_string()) throw ValidationError(child(key), "expected a string");
      out = v->get<std::string>();
    }
  }

  void finish() const {
    for (const auto& item : node_.items()) {
      if (!seen_.contains(item.key())) throw ValidationError(child(item.key()), "unknown key");
    }
  }

 private:
  const json& node_;
  std::string path_;
  std::set<std::string, std::less<>> seen_;
};

template <typename Table, typename Names>
void read_table(Section& parent, const char* key, Table& table, const Names& names) {
  const json* node = parent.get(key);
  if (!node) return;
  Section s(*node, parent.child(key));
  for (auto name : names) {
    const std::string k(to_string(name));
    s.number(k.c_str(), table[name]);
  }
  s.finish();
}

void read_rectum(Section& root, RectumSpec& r) {
  const json* node = root.get("rectum");
  if (!node) return;
  Section s(*node, "rectum");
  s.number("length_mm", r.length_mm);
  s.number("body_radius_mm", r.body_radius_mm);
  s.integer("n_cells", r.n_cells);
  if (auto* p = s.get("lumen_radius_profile_mm")) {
    const auto path = s.child("lumen_radius_profile_mm");
    if (!p->is_array()) throw ValidationError(path, "expected an array of numbers");
    r.lumen_radius_profile_mm.clear();
    for (const auto& v : *p) {
      if (!v.is_number()) throw ValidationError(path, "expected an array of numbers");
      r.lumen_radius_profile_mm.push_back(v.get<double>());
    }
  } else if (r.n_cells > 0) {
    // No explicit profile: a uniform lumen at the body radius.
    r.lumen_radius_profile_mm.assign(static_cast<std::size_t>(r.n_cells), r.body_radius_mm);
  }
  s.finish();
}

void read_actuators(Section& root, Actuators& rings) {
  const json* node = root.get("actuators");
  if (!node) return;
  Section s(*node, "actuators");
  for (auto label : kAllLabels) {
    const std::string key(to_string(label));
    const json* a = s.get(key.c_str());
    if (!a) continue;
    auto& ring = rings[index_of(label)];
    Section r(*a, s.child(key));
    std::string cover(to_string(ring.cover));
    r.string("cover", cover);
    const auto parsed = parse_cover(cover);
    if (!parsed) throw ValidationError(r.child("cover"), "unknown cover type '" + cover + "'");
    ring.cover = *parsed;
    r.number("d_inner_mm", ring.d_inner_mm);
    r.number("d_outer_mm", ring.d_outer_mm);
    r.number("height_mm", ring.height_mm);
    r.number("axial_center_mm", ring.axial_center_mm);
    r.finish();
  }
  s.finish();
}

void read_response(Section& root, ResponseParams& p) {
  const json* node = root.get("response");
  if (!node) return;
  Section s(*node, "response");
  read_table(s, "p_close_kPa", p.p_close_kPa, kAllCovers);
  read_table(s, "gamma", p.gamma, kAllCovers);
  read_table(s, "kappa", p.kappa, kAllCovers);
  read_table(s, "eta", p.eta, kAllLabels);
  s.finish();
}

void read_pneumatics(Section& root, PneumaticsConfig& p) {
  const json* node = root.get("pneumatics");
  if (!node) return;
  Section s(*node, "pneumatics");
  s.number("supply_kPa", p.supply_kPa);
  s.number("tube_inner_diameter_mm", p.tube_inner_diameter_mm);
  s.number("tube_length_m", p.tube_length_m);
  s.number("vent_kPa", p.vent_kPa);
  s.number("air_viscosity_Pa_s", p.air_viscosity_Pa_s);
  read_table(s, "chamber_volume_mL", p.chamber_volume_mL, kAllLabels);
  s.boolean("instant", p.instant);
  s.finish();
}

void read_pattern(Section& root, PatternSpec& p) {
  const json* node = root.get("pattern");
  if (!node) return;
  Section s(*node, "pattern");
  std::string kind(to_string(p.kind));
  s.string("kind", kind);
  const auto parsed = parse_pattern_kind(kind);
  if (!parsed) throw ValidationError(s.child("kind"), "unknown pattern '" + kind + "'");
  p.kind = *parsed;
  s.number("t_on_s", p.t_on_s);
  s.number("t_off_s", p.t_off_s);
  s.integer("n_cycles", p.n_cycles);
  if (auto* t = s.get("total_s")) {
    if (!t->is_number()) throw ValidationError(s.child("total_s"), "expected a number");
    p.custom_total_s = t->get<double>();
  }
  if (auto* tl = s.get("timeline")) {
    const auto path = s.child("timeline");
    if (!tl->is_array()) throw ValidationError(path, "expected an array");
    p.custom_timeline.clear();
    for (std::size_t i = 0; i < tl->size(); ++i) {
      Section e((*tl)[i], path + "[" + std::to_string(i) + "]");
      TimelineEntry entry;
      std::string label;
      e.number("time_s", entry.time_s);
      e.string("label", label);
      e.boolean("open", entry.open);
      e.finish();
      const auto l = parse_label(label);
      if (!l) throw ValidationError(e.child("label"), "expected A1, A2 or A3");
      entry.label = *l;
      p.custom_timeline.push_back(entry);
    }
  }
  s.finish();
}

void read_bolus(Section& root, BolusLayout& b) {
  const json* node = root.get("bolus");
  if (!node) return;
  Section s(*node, "bolus");
  s.integer("n_beads", b.n_beads);
  s.number("length_mm", b.length_mm);
  s.number("width_mm", b.width_mm);
  s.number("density_g_cm3", b.density_g_cm3);
  s.number("gap_mm", b.gap_mm);
  s.finish();
}

void read_transport(Section& root, TransportParams& t) {
  const json* node = root.get("transport");
  if (!node) return;
  Section s(*node, "transport");
  s.number("p_fric", t.p_fric_kPa);
  s.number("mobility", t.mobility_mm_s_kPa);
  s.number("o_push", t.o_push);
  s.number("o_block", t.o_block);
  s.number("dt", t.dt_s);
  s.finish();
}

void read_run(Section& root, RunConfig& r) {
  const json* node = root.get("run");
  if (!node) return;
  Section s(*node, "run");
  std::string exp(to_string(r.experiment));
  s.string("experiment", exp);
  const auto parsed = parse_experiment(exp);
  if (!parsed) throw ValidationError(s.child("experiment"), "expected sweep, pressure, patterns or scenario");
  r.experiment = *parsed;
  s.integer("decimation", r.decimation);
  s.string("out_dir", r.out_dir);
  s.boolean("valves_enabled", r.valves_enabled);
  s.integer("pattern_cycles", r.pattern_cycles);
  s.finish();
}

void require(bool ok, const std::string& field, const std::string& message) {
  if (!ok) throw ValidationError(field, message);
}

template <typename Table, typename Names>
json table_json(const Table& table, const Names& names) {
  json out = json::object();
  for (auto name : names) out[std::string(to_string(name))] = table[name];
  return out;
}

std::pair<std::size_t, std::size_t> line_column(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  std::size_t line = 1;
  std::size_t column = 1;
  for (std::size_t i = 0; i < byte; ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["rectum"] = {{"length_mm", c.rectum.length_mm},
                 {"body_radius_mm", c.rectum.body_radius_mm},
                 {"n_cells", c.rectum.n_cells},
                 {"lumen_radius_profile_mm", c.rectum.lumen_radius_profile_mm}};
  json rings = json::object();
  for (const auto& ring : c.actuators) {
    rings[std::string(to_string(ring.label))] = {{"cover", std::string(to_string(ring.cover))},
                                                 {"d_inner_mm", ring.d_inner_mm},
                                                 {"d_outer_mm", ring.d_outer_mm},
                                                 {"height_mm", ring.height_mm},
                                                 {"axial_center_mm", ring.axial_center_mm}};
  }
  j["actuators"] = rings;
  j["response"] = {{"p_close_kPa", table_json(c.response.p_close_kPa, kAllCovers)},
                   {"gamma", table_json(c.response.gamma, kAllCovers)},
                   {"kappa", table_json(c.response.kappa, kAllCovers)},
                   {"eta", table_json(c.response.eta, kAllLabels)}};
  j["pneumatics"] = {{"supply_kPa", c.pneumatics.supply_kPa},
                     {"tube_inner_diameter_mm", c.pneumatics.tube_inner_diameter_mm},
                     {"tube_length_m", c.pneumatics.tube_length_m},
                     {"vent_kPa", c.pneumatics.vent_kPa},
                     {"air_viscosity_Pa_s", c.pneumatics.air_viscosity_Pa_s},
                     {"chamber_volume_mL", table_json(c.pneumatics.chamber_volume_mL, kAllLabels)},
                     {"instant", c.pneumatics.instant}};
  json timeline = json::array();
  for (const auto& e : c.pattern.custom_timeline) {
    timeline.push_back({{"time_s", e.time_s}, {"label", std::string(to_string(e.label))}, {"open", e.open}});
  }
  j["pattern"] = {{"kind", std::string(to_string(c.pattern.kind))},
                  {"t_on_s", c.pattern.t_on_s},
                  {"t_off_s", c.pattern.t_off_s},
                  {"n_cycles", c.pattern.n_cycles},
                  {"timeline", timeline}};
  if (c.pattern.custom_total_s) j["pattern"]["total_s"] = *c.pattern.custom_total_s;
  j["bolus"] = {{"n_beads", c.bolus.n_beads},
                {"length_mm", c.bolus.length_mm},
                {"width_mm", c.bolus.width_mm},
                {"density_g_cm3", c.bolus.density_g_cm3},
                {"gap_mm", c.bolus.gap_mm}};
  j["transport"] = {{"p_fric", c.transport.p_fric_kPa},
                    {"mobility", c.transport.mobility_mm_s_kPa},
                    {"o_push", c.transport.o_push},
                    {"o_block", c.transport.o_block},
                    {"dt", c.transport.dt_s}};
  j["run"] = {{"experiment", std::string(to_string(c.run.experiment))},
              {"decimation", c.run.decimation},
              {"out_dir", c.run.out_dir},
              {"valves_enabled", c.run.valves_enabled},
              {"pattern_cycles", c.run.pattern_cycles}};
  return j;
}

}  // namespace

ScenarioConfig parse_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    // nlohmann reports the byte index one past the offending character.
    const auto [line, column] = line_column(json_text, e.byte == 0 ? 0 : e.byte - 1);
    throw ParseError("malformed JSON: " + std::string(e.what()), line, column);
  }

  ScenarioConfig c;
  Section root(doc, "");
  read_rectum(root, c.rectum);
  c.actuators = default_actuators(c.rectum);
  read_actuators(root, c.actuators);
  read_response(root, c.response);
  read_pneumatics(root, c.pneumatics);
  read_pattern(root, c.pattern);
  read_bolus(root, c.bolus);
  read_transport(root, c.transport);
  read_run(root, c.run);
  root.finish();

  validate(c);
  return c;
}

void validate(const ScenarioConfig& c) {
  const auto& r = c.rectum;
  require(r.length_mm > 0.0, "rectum.length_mm", "must be positive");
  require(r.body_radius_mm > 0.0, "rectum.body_radius_mm", "must be positive");
  require(r.n_cells >= 3, "rectum.n_cells", "must be at least 3");
  if (!r.lumen_radius_profile_mm.empty()) {
    require(r.lumen_radius_profile_mm.size() == static_cast<std::size_t>(r.n_cells),
            "rectum.lumen_radius_profile_mm", "needs one entry per cell");
    for (double x : r.lumen_radius_profile_mm) {
      require(x > 0.0, "rectum.lumen_radius_profile_mm", "entries must be positive");
    }
  }

  for (auto label : kAllLabels) {
    const auto& ring = c.actuators[index_of(label)];
    const std::string path = "actuators." + std::string(to_string(label));
    require(ring.label == label, path, "label does not match its key");
    require(ring.d_inner_mm > 0.0, path + ".d_inner_mm", "must be positive");
    require(ring.d_outer_mm > ring.d_inner_mm, path + ".d_outer_mm", "must exceed d_inner_mm");
    require(ring.height_mm > 0.0, path + ".height_mm", "must be positive");
    require(ring.span_start_mm() >= 0.0 && ring.span_end_mm() <= r.length_mm,
            path + ".axial_center_mm", "ring span must lie inside the rectum");
  }

  const auto& p = c.response;
  for (auto cover : kAllCovers) {
    const std::string k(to_string(cover));
    require(p.p_close_kPa[cover] > 0.0, "response.p_close_kPa." + k, "must be positive");
    require(p.gamma[cover] > 0.0, "response.gamma." + k, "must be positive");
    require(p.kappa[cover] > 0.0 && p.kappa[cover] <= 1.0, "response.kappa." + k, "must lie in (0, 1]");
  }
  for (auto label : kAllLabels) {
    require(p.eta[label] > 0.0, "response.eta." + std::string(to_string(label)), "must be positive");
  }
  using enum CoverType;
  require(p.kappa[TypeIII] > p.kappa[TypeII] && p.kappa[TypeII] > p.kappa[TypeI], "response.kappa",
          "must increase strictly TypeI < TypeII < TypeIII");
  require(p.p_close_kPa[TypeIII] <= p.p_close_kPa[TypeII] && p.p_close_kPa[TypeII] <= p.p_close_kPa[TypeI] &&
              p.p_close_kPa[TypeI] <= 20.0,
          "response.p_close_kPa", "must satisfy TypeIII <= TypeII <= TypeI <= 20");
  using enum ActuatorLabel;
  require(p.eta[A1] > p.eta[A2] && p.eta[A2] == p.eta[A3], "response.eta", "must satisfy A1 > A2 == A3");

  const auto& pn = c.pneumatics;
  require(pn.supply_kPa >= 0.0, "pneumatics.supply_kPa", "must be >= 0");
  require(pn.tube_inner_diameter_mm > 0.0, "pneumatics.tube_inner_diameter_mm", "must be positive");
  require(pn.tube_length_m > 0.0, "pneumatics.tube_length_m", "must be positive");
  require(pn.air_viscosity_Pa_s > 0.0, "pneumatics.air_viscosity_Pa_s", "must be positive");
  require(pn.vent_kPa >= 0.0 && pn.vent_kPa <= pn.supply_kPa, "pneumatics.vent_kPa",
          "must lie in [0, supply_kPa]");
  for (auto label : kAllLabels) {
    require(pn.chamber_volume_mL[label] > 0.0,
            "pneumatics.chamber_volume_mL." + std::string(to_string(label)), "must be positive");
  }

  const auto& pat = c.pattern;
  if (pat.kind == PatternKind::Custom) {
    try {
      build_custom(pat.custom_timeline, pat.custom_total_s);
    } catch (const Error& e) {
      throw ValidationError("pattern.timeline", e.what());
    }
    require(pat.custom_total_s || !pat.custom_timeline.empty(), "pattern.timeline",
            "custom pattern needs events or total_s");
  } else {
    require(pat.t_on_s > 0.0, "pattern.t_on_s", "must be positive");
    require(pat.t_off_s >= 0.0, "pattern.t_off_s", "must be >= 0");
    require(pat.n_cycles >= 1, "pattern.n_cycles", "must be >= 1");
  }

  const auto& b = c.bolus;
  require(b.n_beads >= 1, "bolus.n_beads", "must be >= 1");
  require(b.length_mm >= kBeadMinLengthMm && b.length_mm <= kBeadMaxLengthMm, "bolus.length_mm",
          "must lie in [15, 20]");
  require(b.width_mm >= kBeadMinWidthMm && b.width_mm <= kBeadMaxWidthMm, "bolus.width_mm",
          "must lie in [5, 12]");
  require(b.density_g_cm3 > 0.0, "bolus.density_g_cm3", "must be positive");
  require(b.gap_mm >= 0.0, "bolus.gap_mm", "must be >= 0");
  try {
    make_default_bolus(c.actuators[0], b, r);
  } catch (const Error& e) {
    throw ValidationError("bolus", e.what());
  }

  const auto& t = c.transport;
  require(t.p_fric_kPa > 0.0, "transport.p_fric", "must be positive");
  require(t.mobility_mm_s_kPa > 0.0, "transport.mobility", "must be positive");
  require(t.o_push > 0.0 && t.o_push <= 1.0, "transport.o_push", "must lie in (0, 1]");
  require(t.o_block >= t.o_push && t.o_block <= 1.0, "transport.o_block", "must lie in [o_push, 1]");
  require(t.dt_s > 0.0, "transport.dt", "must be positive");
  if (!pn.instant) {
    for (auto label : kAllLabels) {
      require(t.dt_s <= max_stable_dt(make_line(pn, label)), "transport.dt",
              "exceeds 0.2 x the pneumatic time constant of " + std::string(to_string(label)));
    }
  }

  require(c.run.decimation >= 1, "run.decimation", "must be >= 1");
  require(c.run.pattern_cycles >= 1, "run.pattern_cycles", "must be >= 1");
  require(!c.run.out_dir.empty(), "run.out_dir", "must not be empty");
}

std::string serialize_config(const ScenarioConfig& config) { return to_json(config).dump(2) + "\n"; }

std::string config_hash(const ScenarioConfig& config) {
  const std::string canonical = to_json(config).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : canonical) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

PneumaticLine make_line(const PneumaticsConfig& pn, ActuatorLabel label) {
  PneumaticLine line;
  line.supply_kPa = pn.supply_kPa;
  line.tube_inner_diameter_mm = pn.tube_inner_diameter_mm;
  line.tube_length_m = pn.tube_length_m;
  line.vent_kPa = pn.vent_kPa;
  line.air_viscosity_Pa_s = pn.air_viscosity_Pa_s;
  line.chamber_volume_mL = pn.chamber_volume_mL[label];
  return derive_time_constants(line);
}

Scene make_scene(const ScenarioConfig& config, const PatternSpec& pattern) {
  Scene scene;
  scene.rectum = config.rectum;
  scene.actuators = config.actuators;
  scene.response = config.response;
  for (auto label : kAllLabels) scene.lines[label] = make_line(config.pneumatics, label);
  scene.instant_pneumatics = config.pneumatics.instant;
  scene.schedule = compile(pattern);
  if (!config.run.valves_enabled) {
    scene.schedule = build_custom({}, scene.schedule.total_duration_s);
  }
  scene.bolus = make_default_bolus(config.actuators[0], config.bolus, config.rectum);
  scene.transport = config.transport;
  scene.decimation = config.run.decimation;
  return scene;
}

Scene make_scene(const ScenarioConfig& config) { return make_scene(config, config.pattern); }

}  // namespace cmasim
