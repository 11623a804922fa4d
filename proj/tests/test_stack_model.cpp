#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "support.hpp"
#include "tsvfarm/stack_model.hpp"

using namespace tsvfarm;
using namespace tsvfarm::testing;

namespace {

bool has_rule(const std::vector<Violation>& v, const std::string& rule) {
  for (const auto& x : v)
    if (x.rule == rule) return true;
  return false;
}

// Independent pairwise check used as the oracle for well-formedness.
bool any_pairwise_overlap(const Floorplan& fp) {
  std::vector<std::pair<int, Rect>> items;
  for (const auto& b : fp.blocks) items.push_back({b.layer, b.rect});
  for (const auto& f : fp.farms)
    for (int l = f.start_layer; l <= f.end_layer; ++l) items.push_back({l, f.rect});
  for (std::size_t i = 0; i < items.size(); ++i)
    for (std::size_t j = i + 1; j < items.size(); ++j) {
      if (items[i].first != items[j].first) continue;
      const Rect& a = items[i].second;
      const Rect& b = items[j].second;
      const double ox = std::min(a.x + a.w, b.x + b.w) - std::max(a.x, b.x);
      const double oy = std::min(a.y + a.h, b.y + b.h) - std::max(a.y, b.y);
      if (ox > 1e-12 && oy > 1e-12) return true;
    }
  return false;
}

Design two_layer_example() {
  Design d;
  d.stack = square_stack(4 * mm, 0.25 * mm, 2);
  d.floorplan.blocks = {block("cpu", 0, {0, 0, 2 * mm, 2 * mm}, 4.0),
                        block("io", 0, {2 * mm, 0, 2 * mm, 1 * mm}, 0.5),
                        block("mem", 1, {0, 0, 4 * mm, 2 * mm}, 1.0)};
  d.floorplan.farms = {farm("bus", {2 * mm, 2 * mm, 1 * mm, 1 * mm}, 0, 1)};
  d.nets = {{"bus", {"cpu", "mem"}}};
  return d;
}

}  // namespace

TEST(Validate, WellFormedTwoLayerDesignIsClean) {
  const Design d = two_layer_example();
  EXPECT_FALSE(any_pairwise_overlap(d.floorplan));
  EXPECT_TRUE(validate(d).empty());
}

TEST(Validate, OverlappingBlocksReported) {
  Design d = two_layer_example();
  d.floorplan.blocks = {block("a", 0, {0, 0, 1 * mm, 1 * mm}), block("b", 0, {0.5 * mm, 0, 1 * mm, 1 * mm})};
  d.nets.clear();
  const auto v = validate(d);
  ASSERT_TRUE(has_rule(v, "overlap"));
  EXPECT_TRUE(any_pairwise_overlap(d.floorplan));
}

TEST(Validate, AreaConservationViolation) {
  Design d = two_layer_example();
  d.floorplan.farms[0].area *= 1.001;
  EXPECT_TRUE(has_rule(validate(d), "area-conservation"));
}

TEST(Validate, TouchingEdgesAreLegal) {
  Design d = two_layer_example();
  d.floorplan.blocks.push_back(block("edge", 0, {3 * mm, 2 * mm, 1 * mm, 1 * mm}));
  EXPECT_TRUE(validate(d).empty());
}

TEST(Validate, ReportsEachRule) {
  Design d = two_layer_example();
  d.stack.layers[1].thickness = 5 * um;
  d.floorplan.blocks[0].power = -1.0;
  d.floorplan.farms[0].rect = {3.5 * mm, 3.5 * mm, 1 * mm, 1 * mm};
  d.nets.push_back({"nope", {"cpu"}});
  const auto v = validate(d);
  EXPECT_TRUE(has_rule(v, "layer-thickness"));
  EXPECT_TRUE(has_rule(v, "power"));
  EXPECT_TRUE(has_rule(v, "inside-footprint"));
  EXPECT_TRUE(has_rule(v, "net-reference"));
}

TEST(Validate, AspectRatioMustBeCandidate) {
  Design d = two_layer_example();
  d.floorplan.farms[0].rect = {2 * mm, 2 * mm, 1.5 * mm, 1 * mm};
  d.floorplan.farms[0].area = 1.5 * mm * mm;
  EXPECT_TRUE(has_rule(validate(d), "aspect-candidate"));
}

TEST(Reshape, SquareAndWide) {
  const auto sq = reshaped_dimensions(4e-6, 1.0);
  EXPECT_NEAR(sq.width, 2 * mm, 1e-15);
  EXPECT_NEAR(sq.height, 2 * mm, 1e-15);
  const auto wide = reshaped_dimensions(4e-6, 4.0);
  EXPECT_NEAR(wide.width, 4 * mm, 1e-15);
  EXPECT_NEAR(wide.height, 1 * mm, 1e-15);
}

TEST(Reshape, ExitingFootprintIsRejected) {
  Design d;
  d.stack = square_stack(3 * mm, 0.25 * mm, 1);
  d.floorplan.farms = {farm("f", {0, 0, 2 * mm, 2 * mm}, 0, 0)};
  const auto out = reshape_farm(d.stack, d.floorplan, 0, 4.0);
  EXPECT_FALSE(out);
  EXPECT_EQ(out.status, MoveStatus::out_of_footprint);
}

TEST(Reshape, UnknownRatioRejected) {
  Design d = two_layer_example();
  EXPECT_EQ(reshape_farm(d.stack, d.floorplan, 0, 3.0).status, MoveStatus::bad_ratio);
}

TEST(Reshape, AnchoredLowerLeftAndReversible) {
  Design d = two_layer_example();
  const Rect before = d.floorplan.farms[0].rect;
  auto wide = reshape_farm(d.stack, d.floorplan, 0, 0.25);
  ASSERT_TRUE(wide);
  EXPECT_EQ(wide.floorplan.farms[0].rect.x, before.x);
  EXPECT_EQ(wide.floorplan.farms[0].rect.y, before.y);
  auto back = reshape_farm(d.stack, wide.floorplan, 0, 1.0);
  ASSERT_TRUE(back);
  EXPECT_NEAR(back.floorplan.farms[0].rect.w, before.w, 1e-12 * before.w);
  EXPECT_NEAR(back.floorplan.farms[0].rect.h, before.h, 1e-12 * before.h);
}

TEST(Move, IntoWhitespaceUpdatesPrism) {
  Design d = two_layer_example();
  auto out = move_farm(d.stack, d.floorplan, 0, {3 * mm, 3 * mm});
  ASSERT_TRUE(out);
  EXPECT_EQ(out.floorplan.farms[0].rect.x, 3 * mm);
  EXPECT_TRUE(validate(d.stack, out.floorplan, d.nets).empty());
  // Input snapshot untouched.
  EXPECT_EQ(d.floorplan.farms[0].rect.x, 2 * mm);
}

TEST(Move, OntoMacroRejected) {
  Design d = two_layer_example();
  EXPECT_EQ(move_farm(d.stack, d.floorplan, 0, {0.5 * mm, 0.5 * mm}).status, MoveStatus::overlap);
}

TEST(Move, PrismRuleChecksUpperLayer) {
  Design d = two_layer_example();
  // (2.5, 1.0) is free on layer 0 (io ends at y = 1 mm) but mem covers it on layer 1.
  const Rect target{2.5 * mm, 1.0 * mm, 1 * mm, 1 * mm};
  Floorplan probe;
  probe.blocks = {d.floorplan.blocks[0], d.floorplan.blocks[1]};
  probe.farms = {farm("bus", target, 0, 0)};
  EXPECT_FALSE(any_pairwise_overlap(probe));
  probe.blocks.push_back(d.floorplan.blocks[2]);
  probe.farms[0].end_layer = 1;
  EXPECT_TRUE(any_pairwise_overlap(probe));
  EXPECT_EQ(move_farm(d.stack, d.floorplan, 0, {target.x, target.y}).status, MoveStatus::overlap);
}

TEST(MoveProperty, RandomLegalSequencesStayValid) {
  Design d;
  d.stack = square_stack(4 * mm, 0.25 * mm, 3);
  d.floorplan.blocks = {block("a", 0, {0, 0, 1 * mm, 1 * mm}), block("b", 1, {2 * mm, 2 * mm, 1 * mm, 1 * mm}),
                        block("c", 2, {0, 3 * mm, 4 * mm, 1 * mm})};
  d.floorplan.farms = {farm("f0", {1 * mm, 0, 0.5 * mm, 0.5 * mm}, 0, 2),
                       farm("f1", {3 * mm, 0, 0.5 * mm, 1 * mm}, 0, 1)};
  d.nets = {{"f0", {"a", "c"}}, {"f1", {"b"}}};
  ASSERT_TRUE(validate(d).empty());
  const double area0 = total_farm_area(d.floorplan);
  std::mt19937_64 gen(7);
  std::uniform_real_distribution<double> pos(0.0, 4 * mm);
  const double ratios[] = {0.25, 0.5, 1.0, 2.0, 4.0};
  Floorplan fp = d.floorplan;
  int accepted = 0;
  for (int step = 0; step < 2000; ++step) {
    const std::size_t f = gen() % fp.farms.size();
    MoveOutcome out = (gen() & 1) ? reshape_farm(d.stack, fp, f, ratios[gen() % 5])
                                  : move_farm(d.stack, fp, f, {pos(gen), pos(gen)});
    if (!out) continue;
    fp = out.floorplan;
    ++accepted;
    ASSERT_TRUE(validate(d.stack, fp, d.nets).empty()) << "step " << step;
    ASSERT_FALSE(any_pairwise_overlap(fp));
  }
  EXPECT_GT(accepted, 100);
  EXPECT_NEAR(total_farm_area(fp), area0, 1e-9 * area0);
}

TEST(Materials, DefaultsAndOverride) {
  auto t = MaterialTable::defaults();
  EXPECT_EQ(t.find("silicon"), 149.0);
  EXPECT_EQ(t.find("tungsten"), 173.0);
  EXPECT_EQ(t.find("adhesive"), 0.29);
  t.set("silicon", 120.0);
  EXPECT_EQ(t.find("silicon"), 120.0);
  EXPECT_FALSE(t.find("unobtainium").has_value());
}

TEST(Materials, PackageResistanceFromTim) {
  // 20 um of TIM (k = 5) over 16 mm^2, plus a 0.3 K/W sink.
  const double r = derive_package_resistance(20 * um, 5.0, 16e-6, 0.3);
  EXPECT_NEAR(r, 20e-6 / (5.0 * 16e-6) + 0.3, 1e-15);
}

TEST(BoundingBox, CoversAllEntities) {
  const Design d = two_layer_example();
  const Rect box = placement_bounding_box(d.floorplan);
  EXPECT_DOUBLE_EQ(box.w, 4 * mm);
  EXPECT_DOUBLE_EQ(box.h, 3 * mm);
}
