#include <gtest/gtest.h>

#include <cmath>

#include "cmasim/errors.hpp"
#include "cmasim/transport.hpp"
#include "oracles.hpp"
#include "scenes.hpp"

using namespace cmasim;

namespace {

struct Fixture {
  RectumSpec rectum = make_rectum();
  Actuators rings = default_actuators(rectum);
  std::vector<Cell> grid = cell_grid(rectum);
  TransportParams params;
};

BeadSpec bead_at(double rear, double length = 17.5) {
  BeadSpec b;
  b.length_mm = length;
  b.width_mm = 8.5;
  b.mass_g = 0.6;
  b.position_mm = rear;
  return b;
}

void expect_same(const SimResult& a, const SimResult& b) {
  ASSERT_EQ(a.samples.size(), b.samples.size());
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_EQ(a.samples[i].t_s, b.samples[i].t_s);
    EXPECT_EQ(a.samples[i].pressure_kPa, b.samples[i].pressure_kPa);
    EXPECT_EQ(a.samples[i].occlusion, b.samples[i].occlusion);
    EXPECT_EQ(a.samples[i].bead_position_mm, b.samples[i].bead_position_mm);
    EXPECT_EQ(a.samples[i].expelled_ug, b.samples[i].expelled_ug);
  }
  ASSERT_EQ(a.expulsions.size(), b.expulsions.size());
  for (std::size_t i = 0; i < a.expulsions.size(); ++i) EXPECT_EQ(a.expulsions[i].t_s, b.expulsions[i].t_s);
  EXPECT_EQ(a.makespan_s, b.makespan_s);
  EXPECT_EQ(a.complete, b.complete);
}

std::vector<PatternSpec> assorted_patterns() {
  auto out = working_patterns(6);
  out.push_back(equal_on_preset(3.0, 1.0, 2));
  out.push_back({PatternKind::Pattern2, 0.4, 0.2, 10, {}, {}});
  out.push_back({PatternKind::Pattern1, 0.25, 0.0, 12, {}, {}});
  return out;
}

}  // namespace

TEST(Occlusion, RestIsOpen) {
  Fixture f;
  const std::vector<double> zero(3, 0.0);
  for (double o : occlusion_profile(f.rings, zero, f.grid)) EXPECT_EQ(o, 0.0);
}

TEST(Occlusion, SingleRingSupport) {
  Fixture f;
  const std::vector<double> ratios{0.0, 0.0, 1.0};
  const auto occ = occlusion_profile(f.rings, ratios, f.grid);
  for (std::size_t c = 0; c < f.grid.size(); ++c) {
    const double mid = f.grid[c].mid_mm();
    const bool under = mid >= f.rings[2].span_start_mm() && mid <= f.rings[2].span_end_mm();
    EXPECT_EQ(occ[c], under ? 1.0 : 0.0) << "cell " << c;
  }
}

TEST(Occlusion, DisjointSpansDoNotBleed) {
  Fixture f;
  const std::vector<double> ratios{0.0, 0.3, 0.9};
  const auto occ = occlusion_profile(f.rings, ratios, f.grid);
  int n03 = 0, n09 = 0;
  for (double o : occ) {
    EXPECT_TRUE(o == 0.0 || o == 0.3 || o == 0.9);
    n03 += o == 0.3;
    n09 += o == 0.9;
  }
  EXPECT_GT(n03, 0);
  EXPECT_GT(n09, 0);
  const auto per_ring = actuator_occlusions(f.rings, occ, f.grid);
  EXPECT_EQ(per_ring, (std::vector<double>{0.0, 0.3, 0.9}));
}

TEST(Occlusion, OverlapTakesMaximum) {
  Fixture f;
  f.rings[1].axial_center_mm = f.rings[2].axial_center_mm;
  const std::vector<double> ratios{0.0, 0.4, 0.7};
  for (double o : occlusion_profile(f.rings, ratios, f.grid)) EXPECT_TRUE(o == 0.0 || o == 0.7);
}

TEST(BolusStep, NoActuationNoMotion) {
  Fixture f;
  const std::vector<BeadSpec> beads{bead_at(60), bead_at(100)};
  const std::vector<double> occ(f.grid.size(), 0.0), gen(3, 0.0);
  const auto out = bolus_step(beads, occ, gen, f.rings, f.grid, f.params, 0.001, f.rectum);
  EXPECT_EQ(out.beads, beads);
  EXPECT_TRUE(out.expelled.empty());
}

TEST(BolusStep, DrivenBeadMovesAtMobilityTimesExcess) {
  Fixture f;
  const std::vector<double> ratios{0.0, 0.0, 1.0};
  const auto occ = occlusion_profile(f.rings, ratios, f.grid);
  const std::vector<double> gen{0.0, 0.0, 9.6};
  const std::vector<BeadSpec> beads{bead_at(130)};
  const auto out = bolus_step(beads, occ, gen, f.rings, f.grid, f.params, 0.001, f.rectum);
  ASSERT_EQ(out.beads.size(), 1u);
  EXPECT_NEAR(out.beads[0].position_mm - 130.0, 0.043, 1e-12);
}

TEST(BolusStep, SealedRingAheadBlocks) {
  Fixture f;
  const std::vector<double> ratios{0.0, 0.5, 0.9};
  const auto occ = occlusion_profile(f.rings, ratios, f.grid);
  const std::vector<double> gen{0.0, 6.5, 0.0};
  const std::vector<BeadSpec> beads{bead_at(110)};
  ASSERT_GT(f.rings[2].span_start_mm(), beads[0].front_mm());
  const auto out = bolus_step(beads, occ, gen, f.rings, f.grid, f.params, 0.001, f.rectum);
  EXPECT_EQ(out.beads[0].position_mm, 110.0);

  // The same push with the ring ahead relaxed goes through.
  const std::vector<double> relaxed{0.0, 0.5, 0.0};
  const auto occ2 = occlusion_profile(f.rings, relaxed, f.grid);
  const auto moved = bolus_step(beads, occ2, gen, f.rings, f.grid, f.params, 0.001, f.rectum);
  EXPECT_GT(moved.beads[0].position_mm, 110.0);
}

TEST(BolusStep, RingOutOfReachDoesNotPush) {
  Fixture f;
  const std::vector<double> ratios{0.0, 0.0, 1.0};
  const auto occ = occlusion_profile(f.rings, ratios, f.grid);
  const std::vector<double> gen{0.0, 0.0, 9.6};
  // Front ends short of the ring's span.
  const std::vector<BeadSpec> behind{bead_at(f.rings[2].span_start_mm() - 18.0)};
  EXPECT_EQ(bolus_step(behind, occ, gen, f.rings, f.grid, f.params, 0.001, f.rectum).beads, behind);
  // Rear more than one bead length past the span end.
  const double far = f.rings[2].span_end_mm() + 17.6;
  if (far + 17.5 <= f.rectum.length_mm) {
    const std::vector<BeadSpec> ahead{bead_at(far)};
    EXPECT_EQ(bolus_step(ahead, occ, gen, f.rings, f.grid, f.params, 0.001, f.rectum).beads, ahead);
  }
}

TEST(BolusStep, ClampsAgainstBeadAhead) {
  Fixture f;
  const std::vector<double> ratios{0.0, 1.0, 0.0};
  const auto occ = occlusion_profile(f.rings, ratios, f.grid);
  const std::vector<double> gen{0.0, 8.0, 0.0};
  // Rear bead pushed hard; front bead is out of reach and stays.
  const double front_rear = f.rings[1].span_end_mm() + 17.5 + 1.0;
  std::vector<BeadSpec> beads{bead_at(front_rear - 17.5 - 0.01), bead_at(front_rear)};
  const auto out = bolus_step(beads, occ, gen, f.rings, f.grid, f.params, 0.1, f.rectum);
  ASSERT_EQ(out.beads.size(), 2u);
  EXPECT_EQ(out.beads[1].position_mm, front_rear);
  EXPECT_LE(out.beads[0].front_mm(), out.beads[1].position_mm);
  EXPECT_GT(out.beads[0].position_mm, beads[0].position_mm);
}

TEST(BolusStep, ExpelsPastOutlet) {
  Fixture f;
  const std::vector<double> ratios{0.0, 0.0, 1.0};
  const auto occ = occlusion_profile(f.rings, ratios, f.grid);
  const std::vector<double> gen{0.0, 0.0, 9.6};
  const std::vector<BeadSpec> beads{bead_at(120), bead_at(163.99)};
  const auto out = bolus_step(beads, occ, gen, f.rings, f.grid, f.params, 0.001, f.rectum);
  EXPECT_EQ(out.expelled, (std::vector<std::size_t>{1}));
  ASSERT_EQ(out.beads.size(), 1u);
}

TEST(BolusStep, RejectsOverlapAndDisorder) {
  Fixture f;
  const std::vector<double> occ(f.grid.size(), 0.0), gen(3, 0.0);
  const std::vector<BeadSpec> overlap{bead_at(50), bead_at(60)};
  EXPECT_THROW(bolus_step(overlap, occ, gen, f.rings, f.grid, f.params, 0.001, f.rectum), InputError);
  const std::vector<BeadSpec> unsorted{bead_at(100), bead_at(50)};
  EXPECT_THROW(bolus_step(unsorted, occ, gen, f.rings, f.grid, f.params, 0.001, f.rectum), InputError);
}

TEST(DefaultBolus, StartsAtFirstRingReach) {
  const auto rectum = make_rectum();
  const auto rings = default_actuators(rectum);
  const auto beads = make_default_bolus(rings[0], BolusLayout{}, rectum);
  ASSERT_EQ(beads.size(), 5u);
  EXPECT_DOUBLE_EQ(beads[0].position_mm, rings[0].span_start_mm() - 17.5);
  double total = 0.0;
  for (std::size_t i = 0; i < beads.size(); ++i) {
    total += beads[i].mass_g;
    if (i) EXPECT_NEAR(beads[i].position_mm - beads[i - 1].front_mm(), 2.0, 1e-12);
  }
  EXPECT_NEAR(total, 3.3, 0.05);
  BolusLayout crowded;
  crowded.n_beads = 9;
  EXPECT_THROW(make_default_bolus(rings[0], crowded, rectum), DomainError);
}

TEST(RunScenario, ClosedFormOracle) {
  const std::vector<std::vector<oracle::Interval>> cases{
      {{0.0, 3.0}}, {{0.2, 0.5}, {0.8, 1.0}, {1.3, 3.0}}, {{0.05, 0.35}, {0.4, 0.45}, {0.6, 2.0}}};
  for (const auto& open : cases) {
    auto toy = scenes::toy_three_cell(open, 4.0);
    const auto r = run_scenario(toy.scene);
    ASSERT_EQ(r.expulsions.size(), 1u);
    EXPECT_TRUE(r.complete);
    const double exact = oracle::expulsion_time(0.0, toy.outlet_mm, toy.speed_mm_s, open);
    EXPECT_LE(std::abs(r.expulsions[0].t_s - exact), toy.scene.transport.dt_s);
    EXPECT_NEAR(defecation_velocity(r), 0.5 / (r.expulsions[0].t_s - open.front().start), 1e-12);
  }
}

TEST(RunScenario, NullStimulus) {
  auto scene = make_default_scene(PatternSpec{PatternKind::Pattern1, 1.0, 1.0, 2, {}, {}});
  scene.schedule = build_custom({}, scene.schedule.total_duration_s);
  const auto r = run_scenario(scene);
  EXPECT_EQ(r.expelled_total_g, 0.0);
  EXPECT_FALSE(r.complete);
  EXPECT_EQ(scored_velocity(r), 0.0);
  EXPECT_THROW(defecation_velocity(r), InputError);
  // Nothing could ever move, so the run stops at the end of the schedule.
  EXPECT_LE(r.makespan_s, scene.schedule.total_duration_s + scene.transport.dt_s);
}

TEST(RunScenario, ConservationProgressNoOverlap) {
  for (const auto& p : assorted_patterns()) {
    const auto scene = make_default_scene(p);
    const auto r = run_scenario(scene);
    std::int64_t last_expelled = 0;
    std::vector<double> last_pos;
    for (const auto& s : r.samples) {
      EXPECT_EQ(s.expelled_ug + s.in_lumen_ug, r.initial_mass_ug);
      EXPECT_GE(s.expelled_ug, last_expelled);
      last_expelled = s.expelled_ug;
      for (std::size_t i = 0; i < last_pos.size(); ++i) EXPECT_GE(s.bead_position_mm[i], last_pos[i]);
      last_pos = s.bead_position_mm;
      for (std::size_t i = 0; i + 1 < s.bead_position_mm.size(); ++i) {
        if (s.bead_position_mm[i + 1] >= scene.rectum.length_mm) continue;
        EXPECT_LE(s.bead_position_mm[i] + scene.bolus[i].length_mm, s.bead_position_mm[i + 1]);
      }
      for (auto l : kAllLabels) {
        EXPECT_GE(s.pressure_kPa[l], 0.0);
        EXPECT_LE(s.pressure_kPa[l], scene.lines[l].supply_kPa);
      }
    }
    std::int64_t expelled = 0;
    for (const auto& e : r.expulsions) expelled += e.mass_ug;
    EXPECT_EQ(expelled, r.samples.back().expelled_ug);
  }
}

TEST(RunScenario, Deterministic) {
  const auto scene = make_default_scene(working_patterns(4)[1]);
  expect_same(run_scenario(scene), run_scenario(scene));
}

TEST(RunScenario, StopWhenEmptyKeepsVelocity) {
  for (const auto& p : working_patterns(8)) {
    const auto scene = make_default_scene(p);
    const auto full = run_scenario(scene);
    const auto fast = run_scenario(scene, RunOptions{.stop_when_empty = true});
    ASSERT_TRUE(full.complete);
    ASSERT_TRUE(fast.complete);
    EXPECT_EQ(defecation_velocity(full), defecation_velocity(fast));
    EXPECT_LE(fast.makespan_s, full.makespan_s);
  }
}

TEST(RunScenario, DefaultsEmptyTheLumenWithDecliningTrend) {
  std::vector<double> v;
  for (const auto& p : working_patterns(8)) {
    const auto r = run_scenario(make_default_scene(p));
    ASSERT_TRUE(r.complete);
    EXPECT_EQ(r.samples.back().in_lumen_ug, 0);
    v.push_back(defecation_velocity(r));
  }
  EXPECT_GT(v[0], v[2]);
  EXPECT_GT(v[2], v[3]);
  EXPECT_GT(v[2], v[1]);
  EXPECT_GT(v[1], v[3]);
}

TEST(RunScenario, StabilityGuardUnlessInstant) {
  auto scene = make_default_scene(working_patterns(1)[0]);
  scene.transport.dt_s = 0.002;
  EXPECT_THROW(run_scenario(scene), ConfigError);
  scene.instant_pneumatics = true;
  EXPECT_NO_THROW(run_scenario(scene));
}

TEST(RunScenario, InputErrors) {
  auto scene = make_default_scene(working_patterns(1)[0]);
  scene.bolus.clear();
  EXPECT_THROW(run_scenario(scene), InputError);
  scene = make_default_scene(working_patterns(1)[0]);
  scene.schedule = build_custom({}, 0.0);
  EXPECT_THROW(run_scenario(scene), InputError);
}

TEST(DefecationVelocity, Arithmetic) {
  SimResult r;
  r.complete = true;
  r.first_open_s = 0.0;
  r.expelled_total_g = 4.2;
  r.expulsions.push_back({0, 10.0, 4200000});
  r.last_expulsion_s = 10.0;
  EXPECT_DOUBLE_EQ(defecation_velocity(r), 0.42);

  SimResult nothing;
  nothing.complete = true;
  nothing.first_open_s = 0.0;
  EXPECT_EQ(defecation_velocity(nothing), 0.0);

  SimResult one;
  one.complete = true;
  one.first_open_s = 0.0;
  one.expelled_total_g = 0.66;
  one.expulsions.push_back({0, 3.0, 660000});
  one.last_expulsion_s = 3.0;
  EXPECT_NEAR(defecation_velocity(one), 0.22, 1e-15);
}

TEST(TransportParams, Validation) {
  TransportParams p;
  EXPECT_NO_THROW(validate(p));
  p.o_push = 0.5;
  p.o_block = 0.4;
  EXPECT_THROW(validate(p), DomainError);
  p = {};
  p.mobility_mm_s_kPa = 0.0;
  EXPECT_THROW(validate(p), DomainError);
  p = {};
  p.dt_s = -1;
  EXPECT_THROW(validate(p), DomainError);
}
