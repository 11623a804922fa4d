#pragma once

#include <algorithm>
#include <limits>
#include <vector>

#include "support.hpp"
#include "tsvfarm/optimizer.hpp"

namespace tsvfarm::testing {

/// Three layers. A farm starting on layer 0 lands on layer 2 and links
/// SRC (layer 0) to DST (layer 2); layer 1 carries only MID, which no net
/// touches. `near` puts the farm beside MID, otherwise it sits in a corner.
inline Design interlayer_design(bool near) {
  Design d;
  d.stack = square_stack(2 * mm, 0.125 * mm, 3, 10 * um, 1.0);
  d.floorplan.blocks = {block("SRC", 0, {0, 0, 0.5 * mm, 0.5 * mm}, 0.5),
                        block("MID", 1, {0.75 * mm, 0.75 * mm, 0.5 * mm, 0.5 * mm}, 1.0),
                        block("DST", 2, {1.5 * mm, 1.5 * mm, 0.5 * mm, 0.5 * mm}, 0.2)};
  const Rect at = near ? Rect{1.25 * mm, 0.75 * mm, 0.25 * mm, 0.5 * mm} : Rect{1.75 * mm, 0, 0.25 * mm, 0.5 * mm};
  d.floorplan.farms = {farm("BUS", at, 0, 2, 0.5)};
  d.nets = {{"BUS", {"SRC", "DST"}}};
  return d;
}

/// Two farms on a coarse 8 x 8 x 2 grid with three aspect ratios, small
/// enough to enumerate every legal configuration.
inline Design oracle_design() {
  Design d;
  d.stack = square_stack(2 * mm, 0.25 * mm, 2, 20 * um, 1.0);
  d.stack.tech.aspect_candidates = {0.25, 1.0, 4.0};
  d.floorplan.blocks = {block("HOT", 0, {0, 0, 0.75 * mm, 0.75 * mm}, 1.5),
                        block("WARM", 0, {0, 1.5 * mm, 0.5 * mm, 0.5 * mm}, 0.6),
                        block("COOL", 0, {1.5 * mm, 0, 0.5 * mm, 0.5 * mm}, 0.1),
                        block("IO", 0, {1.5 * mm, 1.5 * mm, 0.5 * mm, 0.5 * mm}, 0.3),
                        block("TOP", 1, {0.75 * mm, 0.75 * mm, 0.5 * mm, 0.5 * mm}, 0.8)};
  d.floorplan.farms = {farm("F0", {0.75 * mm, 0, 0.5 * mm, 0.5 * mm}, 0, 1, 1.0),
                       farm("F1", {0, 0.75 * mm, 0.5 * mm, 0.5 * mm}, 0, 1, 1.0)};
  d.nets = {{"F0", {"HOT", "COOL"}}, {"F1", {"WARM", "TOP"}}};
  return d;
}

/// Window wide enough that the corridors between corner blocks cross the
/// free region.
inline FlowConfig oracle_flow() {
  FlowConfig f;
  f.efficiency.adjacency_window = 1.1 * mm;
  return f;
}

inline CostWeights oracle_weights() {
  CostWeights w;
  w.alpha = 0.0;
  w.gamma = 0.0;
  w.beta = -300.0;
  w.delta = 500.0;
  return w;
}

/// Every legal placement of the first two farms over grid-aligned origins
/// and all candidate ratios.
inline std::vector<Floorplan> enumerate_two_farm_configs(const Stack& stack, const Floorplan& fp,
                                                        const GridSpec& grid) {
  std::vector<Rect> shapes[2];
  for (int f = 0; f < 2; ++f)
    for (double ratio : stack.tech.aspect_candidates) {
      const auto dim = reshaped_dimensions(fp.farms[f].area, ratio);
      for (int j = 0; j < grid.cells_y; ++j)
        for (int i = 0; i < grid.cells_x; ++i) {
          const Rect r{i * grid.cell_size, j * grid.cell_size, dim.width, dim.height};
          Floorplan alone = fp;
          alone.farms.erase(alone.farms.begin() + (1 - f));
          if (check_farm_placement(stack, alone, 0, r) == MoveStatus::ok) shapes[f].push_back(r);
        }
    }
  std::vector<Floorplan> out;
  for (const Rect& a : shapes[0])
    for (const Rect& b : shapes[1]) {
      Floorplan c = fp;
      c.farms[0].rect = a;
      c.farms[1].rect = b;
      if (check_farm_placement(stack, c, 1, b) == MoveStatus::ok) out.push_back(std::move(c));
    }
  return out;
}

inline double brute_force_min_cost(const ThermalEvaluator& evaluator, const std::vector<Floorplan>& configs) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : configs) best = std::min(best, evaluator.evaluate(c).cost.total);
  return best;
}

}  // namespace tsvfarm::testing
