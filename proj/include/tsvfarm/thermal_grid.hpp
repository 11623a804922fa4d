#pragma once

#include <cstddef>
#include <vector>

#include "tsvfarm/geometry.hpp"
#include "tsvfarm/stack_model.hpp"

namespace tsvfarm {

/// Regular per-layer grid. Cell (i, j) on layer l covers
/// [i*c, (i+1)*c) x [j*c, (j+1)*c); cells are numbered layer-major,
/// then row (j), then column (i).
struct GridSpec {
  int cells_x = 0;
  int cells_y = 0;
  int layers = 0;
  double cell_size = 0.0;  // m

  std::size_t cells_per_layer() const { return static_cast<std::size_t>(cells_x) * cells_y; }
  std::size_t size() const { return cells_per_layer() * layers; }
  std::size_t index(int layer, int j, int i) const {
    return (static_cast<std::size_t>(layer) * cells_y + j) * cells_x + i;
  }
  Rect cell_rect(int i, int j) const { return {i * cell_size, j * cell_size, cell_size, cell_size}; }
  double cell_area() const { return cell_size * cell_size; }

  bool operator==(const GridSpec&) const = default;
};

/// Grid over the stack footprint. Throws ConfigError unless the cells tile
/// the footprint within 1e-9 relative.
GridSpec make_grid(const Stack& stack, double cell_size);
GridSpec make_grid(const Stack& stack);

/// Half-open index range of cells touched by [lo, hi) along one axis.
struct CellSpan {
  int first = 0;
  int last = -1;  // inclusive
};
CellSpan cells_touching(double lo, double hi, double cell_size, int count);

/// Area fractions of farm material per cell. Everything that is not farm
/// (macros, peripherals, whitespace) conducts as substrate.
struct CellOccupancy {
  GridSpec grid;
  std::vector<double> eta_farm;
  std::vector<int> farm;  // governing farm index (largest overlap), -1 if none

  double eta_si(std::size_t cell) const { return 1.0 - eta_farm[cell]; }
};

struct Rasterization {
  CellOccupancy occupancy;
  std::vector<double> power;  // W per cell, dynamic + leakage_ref
};

/// Exact rectangle-intersection rasterization. Block power is spread over
/// cells in proportion to overlap area.
Rasterization rasterize(const Stack& stack, const Floorplan& floorplan, const GridSpec& grid);

/// Per-cell power for the given per-block powers (indexed like
/// floorplan.blocks).
std::vector<double> distribute_power(const Floorplan& floorplan, const GridSpec& grid,
                                     const std::vector<double>& block_power);

/// R = h / (k A).
double resistance(double h, double k, double area);

/// Two-material cell resistance. Series (default) sums the area-fraction
/// scaled terms; parallel adds the fraction-weighted conductances. A material
/// with zero fraction contributes nothing.
double composite_resistance(double h, double area, double k_farm, double eta_farm, double k_si,
                            double eta_si, CompositeMode mode = CompositeMode::series);

struct CellComposition {
  double eta_farm = 0.0;
  double eta_si = 1.0;
  double k_farm_lateral = 1.0;  // already k_si on a farm's landing layer
  double k_metal = 1.0;
  double k_si = 149.0;
};

/// h_L = cell_size, A_L = cell_size * thickness.
double composite_lateral_resistance(const CellComposition& cell, double cell_size, double thickness,
                                    CompositeMode mode = CompositeMode::series);
/// h_V = thickness, A_V = cell_size^2.
double composite_vertical_resistance(const CellComposition& cell, double cell_size,
                                     double thickness, CompositeMode mode = CompositeMode::series);

CellComposition cell_composition(const Stack& stack, const Floorplan& floorplan,
                                 const CellOccupancy& occupancy, std::size_t cell);

/// Symmetric node-to-node conductances (W/K). Each link is stored once, on
/// its lower-index end, so G_ij == G_ji holds by construction.
struct ConductanceNetwork {
  GridSpec grid;
  std::vector<double> east;   // (l,j,i) -- (l,j,i+1)
  std::vector<double> north;  // (l,j,i) -- (l,j+1,i)
  std::vector<double> up;     // (l,j,i) -- (l+1,j,i)
  std::vector<double> ambient;  // (l,j,i) -- ambient, bottom layer only
  std::vector<double> r_lateral;   // composite cell resistances, K/W
  std::vector<double> r_vertical;

  /// Link conductance between two cells, 0 when they are not neighbours.
  double conductance(std::size_t a, std::size_t b) const;
  /// Sum of all conductances incident to the cell, ambient included.
  double diagonal(std::size_t cell) const;
  /// y = G x, fixed summation order per row.
  void multiply(const std::vector<double>& x, std::vector<double>& y) const;
};

ConductanceNetwork build_network(const Stack& stack, const Floorplan& floorplan,
                                 const CellOccupancy& occupancy);

}  // namespace tsvfarm
