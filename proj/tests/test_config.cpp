#include <gtest/gtest.h>

#include <functional>
#include <set>

#include "cmasim/config.hpp"
#include "cmasim/errors.hpp"

using namespace cmasim;

namespace {

std::string field_of(const std::string& doc) {
  try {
    parse_config(doc);
  } catch (const ValidationError& e) {
    return e.field();
  }
  return "<accepted>";
}

}  // namespace

TEST(ParseConfig, EmptyObjectGivesDefaults) {
  const auto c = parse_config("{}");
  EXPECT_EQ(c, ScenarioConfig{});
  EXPECT_EQ(c.transport.dt_s, 0.0005);
  EXPECT_EQ(c.run.experiment, Experiment::Patterns);
  EXPECT_EQ(c.actuators[2].cover, CoverType::TypeIII);
}

TEST(ParseConfig, NamesTheOffendingField) {
  EXPECT_EQ(field_of(R"({"transport":{"dt":-1}})"), "transport.dt");
  EXPECT_EQ(field_of(R"({"transport":{"dt":0.01}})"), "transport.dt");
  EXPECT_EQ(field_of(R"({"transport":{"o_push":0.9,"o_block":0.5}})"), "transport.o_block");
  EXPECT_EQ(field_of(R"({"rectum":{"n_cells":2}})"), "rectum.n_cells");
  EXPECT_EQ(field_of(R"({"rectum":{"lumen_radius_profile_mm":[1,2]}})"), "rectum.lumen_radius_profile_mm");
  EXPECT_EQ(field_of(R"({"actuators":{"A2":{"d_inner_mm":70}}})"), "actuators.A2.d_outer_mm");
  EXPECT_EQ(field_of(R"({"actuators":{"A3":{"axial_center_mm":160}}})"), "actuators.A3.axial_center_mm");
  EXPECT_EQ(field_of(R"({"actuators":{"A1":{"cover":"TypeIV"}}})"), "actuators.A1.cover");
  EXPECT_EQ(field_of(R"({"response":{"kappa":{"TypeI":0.7}}})"), "response.kappa");
  EXPECT_EQ(field_of(R"({"response":{"p_close_kPa":{"TypeI":25}}})"), "response.p_close_kPa");
  EXPECT_EQ(field_of(R"({"response":{"eta":{"A3":0.9}}})"), "response.eta");
  EXPECT_EQ(field_of(R"({"response":{"gamma":{"TypeII":0}}})"), "response.gamma.TypeII");
  EXPECT_EQ(field_of(R"({"pneumatics":{"chamber_volume_mL":{"A2":0}}})"), "pneumatics.chamber_volume_mL.A2");
  EXPECT_EQ(field_of(R"({"pneumatics":{"supply_kPa":-1}})"), "pneumatics.supply_kPa");
  EXPECT_EQ(field_of(R"({"pattern":{"t_on_s":0}})"), "pattern.t_on_s");
  EXPECT_EQ(field_of(R"({"pattern":{"kind":"pattern9"}})"), "pattern.kind");
  EXPECT_EQ(field_of(R"({"pattern":{"kind":"custom","timeline":[{"time_s":0,"label":"A1","open":true}]}})"),
            "pattern.timeline");
  EXPECT_EQ(field_of(R"({"bolus":{"length_mm":25}})"), "bolus.length_mm");
  EXPECT_EQ(field_of(R"({"bolus":{"n_beads":12}})"), "bolus");
  EXPECT_EQ(field_of(R"({"run":{"decimation":0}})"), "run.decimation");
  EXPECT_EQ(field_of(R"({"run":{"experiment":"bogus"}})"), "run.experiment");
}

TEST(ParseConfig, RejectsUnknownKeysAndWrongTypes) {
  EXPECT_EQ(field_of(R"({"transport":{"dtt":0.001}})"), "transport.dtt");
  EXPECT_EQ(field_of(R"({"colour":"red"})"), "colour");
  EXPECT_EQ(field_of(R"({"actuators":{"A4":{}}})"), "actuators.A4");
  EXPECT_EQ(field_of(R"({"transport":{"dt":"fast"}})"), "transport.dt");
  EXPECT_EQ(field_of(R"({"rectum":{"n_cells":4.5}})"), "rectum.n_cells");
  EXPECT_EQ(field_of(R"({"pneumatics":{"instant":1}})"), "pneumatics.instant");
  EXPECT_EQ(field_of(R"({"transport":[1,2]})"), "transport");
  EXPECT_EQ(field_of("[]"), "<root>");
}

TEST(ParseConfig, MalformedJsonReportsPosition) {
  try {
    parse_config("{\n  \"rectum\": {\n    \"length_mm\": 12,,\n  }\n}");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
    EXPECT_EQ(e.column(), 21u);
  }
  EXPECT_THROW(parse_config(""), ParseError);
  EXPECT_THROW(parse_config("{"), ParseError);
}

TEST(ParseConfig, InstantModeLiftsTheStepGuard) {
  EXPECT_NO_THROW(parse_config(R"({"transport":{"dt":0.01},"pneumatics":{"instant":true}})"));
}

TEST(ParseConfig, CentresFollowRectumLength) {
  const auto c = parse_config(R"({"rectum":{"length_mm":200}})");
  EXPECT_DOUBLE_EQ(c.actuators[0].axial_center_mm, 0.5 * 200);
  EXPECT_EQ(c.rectum.lumen_radius_profile_mm.size(), 40u);
}

TEST(ParseConfig, CellCountWithoutProfileGivesUniformLumen) {
  const auto c = parse_config(R"({"rectum":{"n_cells":80,"body_radius_mm":30}})");
  ASSERT_EQ(c.rectum.lumen_radius_profile_mm.size(), 80u);
  for (double r : c.rectum.lumen_radius_profile_mm) EXPECT_EQ(r, 30.0);
  EXPECT_EQ(parse_config(R"({"rectum":{}})"), ScenarioConfig{});
}

TEST(Serialize, RoundTrip) {
  EXPECT_EQ(parse_config(serialize_config(ScenarioConfig{})), ScenarioConfig{});
  const char* doc = R"({
    "rectum": {"length_mm": 180, "n_cells": 30, "lumen_radius_profile_mm": []},
    "actuators": {"A1": {"cover": "Type-III", "height_mm": 12.5}, "A3": {"axial_center_mm": 150.25}},
    "response": {"gamma": {"TypeII": 1.75}, "eta": {"A1": 1.4}},
    "pneumatics": {"supply_kPa": 12, "chamber_volume_mL": {"A3": 20}},
    "pattern": {"kind": "custom", "total_s": 5,
                "timeline": [{"time_s": 0.1, "label": "A2", "open": true},
                             {"time_s": 0.9, "label": "A2", "open": false}]},
    "bolus": {"n_beads": 3, "width_mm": 9.1},
    "transport": {"p_fric": 0.3333333333333333, "mobility": 47.56828460010884},
    "run": {"experiment": "scenario", "decimation": 7, "out_dir": "x/y", "valves_enabled": false}
  })";
  const auto c = parse_config(doc);
  EXPECT_EQ(c.rectum.length_mm, 180.0);
  EXPECT_TRUE(c.rectum.lumen_radius_profile_mm.empty());
  EXPECT_EQ(c.actuators[0].cover, CoverType::TypeIII);
  EXPECT_EQ(c.pattern.custom_timeline.size(), 2u);
  const auto again = parse_config(serialize_config(c));
  EXPECT_EQ(again, c);
  EXPECT_EQ(serialize_config(again), serialize_config(c));
}

TEST(ConfigHash, StableAndSensitive) {
  const ScenarioConfig base;
  EXPECT_EQ(config_hash(base), config_hash(parse_config("{}")));
  EXPECT_EQ(config_hash(base).size(), 16u);

  std::vector<std::function<void(ScenarioConfig&)>> edits{
      [](auto& c) { c.rectum.body_radius_mm = 36; },
      [](auto& c) { c.rectum.lumen_radius_profile_mm[5] = 30; },
      [](auto& c) { c.actuators[1].height_mm = 14; },
      [](auto& c) { c.actuators[2].cover = CoverType::TypeII; },
      [](auto& c) { c.response.gamma[CoverType::TypeI] = 2.1; },
      [](auto& c) { c.pneumatics.tube_length_m = 1.5; },
      [](auto& c) { c.pneumatics.instant = true; },
      [](auto& c) { c.pattern.n_cycles = 9; },
      [](auto& c) { c.pattern.custom_total_s = 3.0; },
      [](auto& c) { c.bolus.gap_mm = 2.5; },
      [](auto& c) { c.transport.o_block = 0.31; },
      [](auto& c) { c.transport.dt_s = 0.00025; },
      [](auto& c) { c.run.decimation = 100; },
      [](auto& c) { c.run.out_dir = "elsewhere"; },
      [](auto& c) { c.run.valves_enabled = false; },
  };
  std::set<std::string> seen{config_hash(base)};
  for (const auto& edit : edits) {
    ScenarioConfig c = base;
    edit(c);
    EXPECT_TRUE(seen.insert(config_hash(c)).second);
  }
}

TEST(MakeScene, UsesConfigRecords) {
  auto c = parse_config(R"({"pneumatics":{"supply_kPa":12},"run":{"decimation":5}})");
  const auto scene = make_scene(c);
  EXPECT_EQ(scene.lines[ActuatorLabel::A2].supply_kPa, 12.0);
  EXPECT_EQ(scene.lines[ActuatorLabel::A2].chamber_volume_mL, 18.0);
  EXPECT_EQ(scene.decimation, 5);
  EXPECT_EQ(scene.bolus.size(), 5u);
  c.run.valves_enabled = false;
  const auto closed = make_scene(c);
  EXPECT_EQ(closed.schedule.total_duration_s, scene.schedule.total_duration_s);
  for (auto l : kAllLabels) EXPECT_TRUE(closed.schedule.events[l].empty());
}
