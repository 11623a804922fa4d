#include <gtest/gtest.h>

#include <random>

#include "support.hpp"
#include "tsvfarm/errors.hpp"
#include "tsvfarm/metrics.hpp"

using namespace tsvfarm;
using namespace tsvfarm::testing;

namespace {

Rect centred(double cx, double cy, double w, double h) { return {cx - w / 2, cy - h / 2, w, h}; }

struct Solved {
  Stack stack;
  Floorplan fp;
  ConductanceNetwork net;
  TemperatureField field;
};

Solved solve(Stack s, Floorplan fp) {
  Solved out{std::move(s), std::move(fp), {}, {}};
  const auto grid = make_grid(out.stack);
  const auto r = rasterize(out.stack, out.fp, grid);
  out.net = build_network(out.stack, out.fp, r.occupancy);
  out.field = solve_steady_state(out.net, r.power, out.stack.tech.ambient);
  return out;
}

}  // namespace

TEST(HeatConduction, Values) {
  EXPECT_EQ(heat_conduction(149.0, 1e-9, 0.0, 1e-4), 0.0);
  EXPECT_NEAR(heat_conduction(149.0, 1e-9, 10.0, 1e-4), 1.49e-2, 1e-15);
  EXPECT_DOUBLE_EQ(heat_conduction(149.0, 1e-9, 20.0, 1e-4), 2.0 * heat_conduction(149.0, 1e-9, 10.0, 1e-4));
  EXPECT_THROW(heat_conduction(149.0, 1e-9, 1.0, 0.0), DomainError);
}

TEST(Efficiency, Values) {
  EXPECT_EQ(conduction_efficiency(149.0, 0.0, 1e-4), 0.0);
  EXPECT_NEAR(conduction_efficiency(149.0, 1e-9, 1e-4), 1.49e-3, 1e-16);
  EXPECT_THROW(conduction_efficiency(149.0, 1e-9, 0.0), DomainError);
}

TEST(Efficiency, InverseOfResistance) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int i = 0; i < 1000; ++i) {
    const double k = 20 * u(gen), a = 1e-9 * u(gen), x = 1e-4 * u(gen);
    const double e = conduction_efficiency(k, a, x);
    EXPECT_NEAR(e, 1.0 / resistance(x, k, a), 1e-12 * e);
  }
}

TEST(TotalEfficiency, SingleBlockIsZero) {
  auto s = solve(square_stack(2 * mm, 0.25 * mm, 1), {});
  s.fp.blocks = {block("a", 0, {0, 0, 1 * mm, 1 * mm}, 1.0)};
  EXPECT_EQ(total_efficiency(s.stack, s.fp, s.net, s.field), 0.0);
}

TEST(TotalEfficiency, AbuttingSiliconPair) {
  Floorplan fp;
  fp.blocks = {block("a", 0, {0, 0, 1 * mm, 1 * mm}, 1.0), block("b", 0, {1 * mm, 0, 1 * mm, 1 * mm})};
  auto s = solve(square_stack(2 * mm, 0.25 * mm, 1, 50 * um), fp);
  const auto pairs = adjacent_pairs(s.stack, s.fp, s.net, &s.field);
  ASSERT_EQ(pairs.size(), 1u);
  const double expect = conduction_efficiency(149.0, 1 * mm * 50 * um, 1 * mm);
  EXPECT_NEAR(pairs[0].efficiency, expect, 1e-12 * expect);
  EXPECT_DOUBLE_EQ(pairs[0].weight, 1.0);
  EXPECT_NEAR(total_efficiency(s.stack, s.fp, s.net, s.field), expect, 1e-12 * expect);
}

TEST(TotalEfficiency, WindowDecidesAdjacency) {
  Floorplan fp;
  fp.blocks = {block("a", 0, {0, 0, 1 * mm, 1 * mm}, 1.0), block("b", 0, {1.5 * mm, 0, 0.5 * mm, 1 * mm})};
  auto s = solve(square_stack(2 * mm, 0.25 * mm, 1), fp);
  EXPECT_TRUE(adjacent_pairs(s.stack, s.fp, s.net, nullptr).empty());
  EfficiencyOptions wide;
  wide.adjacency_window = 0.75 * mm;
  EXPECT_EQ(adjacent_pairs(s.stack, s.fp, s.net, nullptr, wide).size(), 1u);
}

TEST(TotalEfficiency, FarmInCorridorMatchesSeriesOracle) {
  const double t = 50 * um;
  Floorplan fp;
  fp.blocks = {block("a", 0, {0, 0, 1 * mm, 1 * mm}, 1.0), block("b", 0, {1 * mm, 0, 1 * mm, 1 * mm})};
  fp.farms = {farm("f", {0.8 * mm, 0, 0.4 * mm, 1 * mm}, 0, 1, 2.75)};
  auto s = solve(square_stack(2 * mm, 0.1 * mm, 2, t), fp);
  const double a = 1 * mm * t;
  const double r_series = 0.6 * mm / (149.0 * a) + 0.4 * mm / (2.75 * a);
  const auto pairs = adjacent_pairs(s.stack, s.fp, s.net, nullptr);
  ASSERT_EQ(pairs.size(), 1u);
  EXPECT_NEAR(pairs[0].efficiency, 1.0 / r_series, 1e-9 / r_series);
  EXPECT_LT(pairs[0].efficiency, conduction_efficiency(149.0, a, 1 * mm));
}

TEST(TotalEfficiency, MovingFarmOutOfCorridorIncreases) {
  Floorplan fp;
  fp.blocks = {block("hot", 0, {0, 0, 1 * mm, 1 * mm}, 2.0), block("cool", 0, {1.5 * mm, 0, 1 * mm, 1 * mm}),
               block("far", 0, {0, 2 * mm, 1 * mm, 1 * mm}, 0.1)};
  fp.farms = {farm("f", {1 * mm, 0, 0.5 * mm, 1 * mm}, 0, 1, 2.75)};
  EfficiencyOptions opt;
  opt.adjacency_window = 0.75 * mm;
  auto inside = solve(square_stack(3 * mm, 0.25 * mm, 2), fp);
  const double f_in = total_efficiency(inside.stack, inside.fp, inside.net, inside.field, opt);
  fp.farms[0].rect = {2.5 * mm, 2 * mm, 0.5 * mm, 1 * mm};
  auto outside = solve(square_stack(3 * mm, 0.25 * mm, 2), fp);
  const double f_out = total_efficiency(outside.stack, outside.fp, outside.net, outside.field, opt);
  EXPECT_GT(f_out, f_in);
  EXPECT_GE(f_in, 0.0);
}

TEST(Wirelength, ManhattanSums) {
  Floorplan fp;
  fp.farms = {farm("f", centred(0, 0, 0.2 * mm, 0.2 * mm), 0, 0)};
  fp.blocks = {block("a", 0, centred(3 * mm, 4 * mm, 1 * mm, 1 * mm))};
  EXPECT_NEAR(wirelength(fp, {{"f", {"a"}}}), 7 * mm, 1e-15);
  fp.blocks = {block("a", 0, centred(1 * mm, 2 * mm, 1 * mm, 1 * mm)),
               block("b", 0, centred(3 * mm, 1 * mm, 1 * mm, 1 * mm))};
  EXPECT_NEAR(wirelength(fp, {{"f", {"a", "b"}}}), 7 * mm, 1e-15);
}

TEST(Wirelength, TranslationInvariant) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.0, 5 * mm);
  for (int i = 0; i < 100; ++i) {
    Floorplan fp;
    fp.farms = {farm("f", {u(gen), u(gen), 0.1 * mm, 0.1 * mm}, 0, 0)};
    fp.blocks = {block("a", 0, {u(gen), u(gen), 1 * mm, 1 * mm}), block("b", 0, {u(gen), u(gen), 2 * mm, 1 * mm})};
    const std::vector<Net> nets{{"f", {"a", "b"}}};
    const double w0 = wirelength(fp, nets);
    const double dx = u(gen), dy = u(gen);
    for (auto& f : fp.farms) f.rect = {f.rect.x + dx, f.rect.y + dy, f.rect.w, f.rect.h};
    for (auto& b : fp.blocks) b.rect = {b.rect.x + dx, b.rect.y + dy, b.rect.w, b.rect.h};
    EXPECT_NEAR(wirelength(fp, nets), w0, 1e-12);
  }
}

TEST(Wirelength, DanglingReferenceIsDataError) {
  Floorplan fp;
  fp.farms = {farm("f", {0, 0, 1 * mm, 1 * mm}, 0, 0)};
  EXPECT_THROW(wirelength(fp, {{"f", {"ghost"}}}), DataError);
  EXPECT_THROW(wirelength(fp, {{"g", {}}}), DataError);
}

TEST(RatioPenalty, Values) {
  Floorplan fp;
  fp.blocks = {block("a", 0, {0, 0, 1 * mm, 1 * mm})};
  EXPECT_EQ(ratio_penalty(fp, 1.0), 0.0);
  fp.blocks = {block("a", 0, {0, 0, 1.5 * mm, 1 * mm})};
  EXPECT_NEAR(ratio_penalty(fp, 1.0), 0.5, 1e-12);
  Floorplan narrow;
  narrow.blocks = {block("a", 0, {0, 0, 1 * mm, 2 * mm})};
  EXPECT_NEAR(ratio_penalty(narrow, 1.0), ratio_penalty(fp, 1.0), 1e-12);
}

TEST(Cost, WeightedSum) {
  CostWeights w;
  w.alpha = 1.0 / (mm * mm);
  w.beta = -2.0;
  w.gamma = 3.0;
  w.delta = 0.001 / mm;
  const auto c = combine(100 * mm * mm, 5.0, 0.2, 1000 * mm, w);
  EXPECT_NEAR(c.total, 91.6, 1e-9);
  EXPECT_EQ(c.f_h, 5.0);
  EXPECT_EQ(c.total, w.alpha * c.area + w.beta * c.f_h + w.gamma * c.ratio_penalty + w.delta * c.wirelength);
  EXPECT_LT(combine(100 * mm * mm, 6.0, 0.2, 1000 * mm, w).total, c.total);
}

TEST(Cost, ZeroWeightsGiveZero) {
  CostWeights w;
  w.beta = 0.0;
  EXPECT_EQ(combine(1.0, 7.0, 3.0, 2.0, w).total, 0.0);
}

TEST(Cost, DeterministicAndWeightsChecked) {
  Floorplan fp;
  fp.blocks = {block("a", 0, {0, 0, 1 * mm, 1 * mm}, 1.0), block("b", 0, {1 * mm, 0, 1 * mm, 1 * mm})};
  fp.farms = {farm("f", {0, 1 * mm, 0.5 * mm, 0.5 * mm}, 0, 0)};
  auto s = solve(square_stack(2 * mm, 0.25 * mm, 1), fp);
  const std::vector<Net> nets{{"f", {"a"}}};
  CostWeights w{1e6, -1.0, 1.0, 10.0, 1.0};
  const auto c1 = cost(s.stack, s.fp, nets, s.net, s.field, w);
  const auto c2 = cost(s.stack, s.fp, nets, s.net, s.field, w);
  EXPECT_EQ(c1.total, c2.total);
  EXPECT_EQ(c1.f_h, c2.f_h);
  EXPECT_NO_THROW(check_weights(w));
  w.beta = 0.5;
  EXPECT_THROW(check_weights(w), ConfigError);
  w.beta = -1.0;
  w.alpha = -1.0;
  EXPECT_THROW(check_weights(w), ConfigError);
}
