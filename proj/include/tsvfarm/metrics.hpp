#pragma once

#include <cstddef>
#include <vector>

#include "tsvfarm/stack_model.hpp"
#include "tsvfarm/thermal_grid.hpp"
#include "tsvfarm/thermal_solver.hpp"

namespace tsvfarm {

/// Objective weights. beta must be negative: more conduction efficiency
/// lowers the cost.
struct CostWeights {
  double alpha = 0.0;  // per m^2 of floorplan area
  double beta = -1.0;  // per W/K of efficiency
  double gamma = 0.0;  // per unit of aspect-ratio deviation
  double delta = 0.0;  // per m of wirelength
  double ratio_preset = 1.0;
};

/// Throws ConfigError unless beta < 0 and alpha, gamma, delta >= 0.
void check_weights(const CostWeights& w);

struct CostBreakdown {
  double area = 0.0;  // m^2
  double f_h = 0.0;  // W/K
  double ratio_penalty = 0.0;
  double wirelength = 0.0;  // m
  double total = 0.0;
};

/// Heat flow k A dT / x, W.
double heat_conduction(double k, double area, double delta_t, double x);

/// Heat flow per kelvin, k A / x (W/K). Zero when the faces do not touch
/// (area == 0).
double conduction_efficiency(double k, double area, double x);

struct EfficiencyOptions {
  /// Maximum edge gap for two blocks to count as adjacent; 0 means one grid
  /// cell.
  double adjacency_window = 0.0;
  /// Scale each pair by |dT_AB| / max |dT| from the solved field.
  bool gradient_weighting = true;
};

/// One adjacent block pair and its conduction along the centre-to-centre
/// corridor.
struct AdjacentPair {
  std::size_t a = 0;  // indices into floorplan.blocks
  std::size_t b = 0;
  int layer = 0;
  double shared_length = 0.0;  // m, projection overlap
  double distance = 0.0;  // m, centre to centre along the separating axis
  double cross_section = 0.0;  // m^2
  double k_eff = 0.0;  // series composite along the corridor
  double efficiency = 0.0;  // W/K, unweighted
  double weight = 1.0;
};

/// Adjacent pairs with corridor conductivities taken from the network's
/// composite cell resistances, so farms in the corridor count with the same
/// material model the solver uses.
std::vector<AdjacentPair> adjacent_pairs(const Stack& stack, const Floorplan& floorplan,
                                         const ConductanceNetwork& net,
                                         const TemperatureField* field,
                                         const EfficiencyOptions& options = {});

/// Sum of (weighted) pair efficiencies, W/K.
double total_efficiency(const Stack& stack, const Floorplan& floorplan, const ConductanceNetwork& net,
                        const TemperatureField& field, const EfficiencyOptions& options = {});

/// Planar Manhattan distance from each farm centre to each client block
/// centre, summed over nets. Throws DataError on a dangling reference.
double wirelength(const Floorplan& floorplan, const std::vector<Net>& nets);

/// Bounding-box area of all placed entities.
double floorplan_area(const Floorplan& floorplan);

/// |bbox width / bbox height - preset|.
double ratio_penalty(const Floorplan& floorplan, double ratio_preset);

CostBreakdown combine(double area, double f_h, double ratio_penalty, double wirelength,
                      const CostWeights& w);

CostBreakdown cost(const Stack& stack, const Floorplan& floorplan, const std::vector<Net>& nets,
                   const ConductanceNetwork& net, const TemperatureField& field,
                   const CostWeights& weights, const EfficiencyOptions& options = {});

}  // namespace tsvfarm
