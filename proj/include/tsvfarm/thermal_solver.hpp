#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "tsvfarm/thermal_grid.hpp"

namespace tsvfarm {

struct TemperatureField {
  GridSpec grid;
  double ambient = 0.0;
  std::vector<double> t;  // K, indexed like GridSpec::index
  double residual = 0.0;  // infinity norm of G T - P - G_amb T_amb, W
  int iterations = 0;

  double at(int layer, int j, int i) const { return t[grid.index(layer, j, i)]; }
};

struct SolverOptions {
  /// Stop when ||r||_inf <= relative_tolerance * max(sum P, 1 W).
  double relative_tolerance = 1e-12;
  /// When round-off stalls progress or the iteration cap is hit, a residual
  /// within this bound is still accepted.
  double acceptable_tolerance = 1e-8;
  /// 0 selects 100 * (number of cells).
  int max_iterations = 0;
};

/// Solves G T = P + G_amb T_amb with diagonally preconditioned conjugate
/// gradients. `warm` (same grid) seeds the iteration. Throws
/// SingularSystemError when some cell has no conductive path to ambient and
/// SolverError on non-convergence.
TemperatureField solve_steady_state(const ConductanceNetwork& net, const std::vector<double>& power,
                                    double ambient, const SolverOptions& options = {},
                                    const TemperatureField* warm = nullptr);

/// Heat leaving through the package, W.
double heat_to_ambient(const ConductanceNetwork& net, const TemperatureField& field);

/// Footprint-average temperature of a rectangle on one layer.
double region_average(const TemperatureField& field, int layer, const Rect& r);

struct LeakageOptions {
  double lambda = 0.0;  // 1/K
  double t_ref = 298.15;  // K
  double tolerance = 0.01;  // K, max cell change between iterations
  int max_iterations = 50;
  int runaway_window = 5;  // consecutive growing updates
};

struct CoupledSolution {
  TemperatureField field;
  std::vector<double> block_power;  // W, dynamic + temperature-scaled leakage
  int iterations = 0;
};

/// Fixed point of P_leak(T) = leakage_ref (1 + lambda (T_block - T_ref)).
/// Throws ThermalRunawayError when updates keep growing.
CoupledSolution couple_leakage(const Stack& stack, const Floorplan& floorplan,
                               const ConductanceNetwork& net, const LeakageOptions& leakage,
                               const SolverOptions& solver = {},
                               const TemperatureField* warm = nullptr);

/// Region selector for field statistics.
struct FieldRegion {
  enum class Kind { stack, layer, block };
  Kind kind = Kind::stack;
  int layer = 0;
  std::string block;

  static FieldRegion whole() { return {}; }
  static FieldRegion of_layer(int l) { return {Kind::layer, l, {}}; }
  static FieldRegion of_block(std::string name) { return {Kind::block, 0, std::move(name)}; }
};

struct FieldStats {
  double peak = 0.0;
  double average = 0.0;
  std::string hottest_block;  // empty when the region has no blocks
  double hottest_block_t = 0.0;
};

/// Peak and area-weighted average over the region, plus the block with the
/// highest footprint-average temperature (ties go to the smaller name).
FieldStats field_stats(const TemperatureField& field, const Floorplan& floorplan,
                       const FieldRegion& region = FieldRegion::whole());

/// Text map: '#' header lines (layer, cells_x, cells_y, cell size), then
/// cells_y rows of cells_x values with two decimals. Row 0 is the lowest y.
void write_thermal_map(std::ostream& os, const TemperatureField& field, int layer);

struct ThermalMap {
  int layer = 0;
  int cells_x = 0;
  int cells_y = 0;
  double cell_size = 0.0;
  std::vector<std::vector<double>> rows;
};
ThermalMap read_thermal_map(std::istream& is);

}  // namespace tsvfarm
