#include "tsvfarm/thermal_grid.hpp"

#include <algorithm>
#include <cmath>

#include "tsvfarm/errors.hpp"

namespace tsvfarm {

namespace {

// Fractions this close to 0 or 1 are rasterization noise from edges that sit
// on cell boundaries; the series cell formula would otherwise blow them up.
constexpr double kFractionSnap = 1e-9;

int tiling_count(double length, double cell, const char* axis) {
  const double n = std::round(length / cell);
  if (n < 1.0 || std::abs(n * cell - length) > 1e-9 * length)
    throw ConfigError(std::string("grid cell does not tile the footprint ") + axis);
  return static_cast<int>(n);
}

}  // namespace

GridSpec make_grid(const Stack& stack, double cell_size) {
  if (!(cell_size > 0.0)) throw ConfigError("grid cell size must be > 0");
  GridSpec g;
  g.cell_size = cell_size;
  g.cells_x = tiling_count(stack.tech.width, cell_size, "width");
  g.cells_y = tiling_count(stack.tech.height, cell_size, "height");
  g.layers = stack.layer_count();
  return g;
}

GridSpec make_grid(const Stack& stack) { return make_grid(stack, stack.tech.grid_cell); }

CellSpan cells_touching(double lo, double hi, double cell_size, int count) {
  CellSpan s;
  s.first = std::max(0, static_cast<int>(std::floor(lo / cell_size)));
  s.last = std::min(count - 1, static_cast<int>(std::ceil(hi / cell_size)) - 1);
  return s;
}

std::vector<double> distribute_power(const Floorplan& fp, const GridSpec& grid,
                                     const std::vector<double>& block_power) {
  std::vector<double> power(grid.size(), 0.0);
  for (std::size_t b = 0; b < fp.blocks.size(); ++b) {
    const auto& blk = fp.blocks[b];
    const double p = block_power[b];
    if (p == 0.0) continue;
    const double inv_area = 1.0 / blk.rect.area();
    const auto xs = cells_touching(blk.rect.x, blk.rect.x1(), grid.cell_size, grid.cells_x);
    const auto ys = cells_touching(blk.rect.y, blk.rect.y1(), grid.cell_size, grid.cells_y);
    for (int j = ys.first; j <= ys.last; ++j)
      for (int i = xs.first; i <= xs.last; ++i) {
        const double a = overlap_area(blk.rect, grid.cell_rect(i, j));
        if (a > 0.0) power[grid.index(blk.layer, j, i)] += p * a * inv_area;
      }
  }
  return power;
}

Rasterization rasterize(const Stack& stack, const Floorplan& fp, const GridSpec& grid) {
  if (grid.layers != stack.layer_count()) throw ConfigError("grid layer count differs from stack");
  const auto expect = make_grid(stack, grid.cell_size);
  if (expect.cells_x != grid.cells_x || expect.cells_y != grid.cells_y)
    throw ConfigError("grid does not tile the footprint");

  Rasterization r;
  auto& occ = r.occupancy;
  occ.grid = grid;
  occ.eta_farm.assign(grid.size(), 0.0);
  occ.farm.assign(grid.size(), -1);
  std::vector<double> best(grid.size(), 0.0);

  const double cell_area = grid.cell_area();
  for (std::size_t f = 0; f < fp.farms.size(); ++f) {
    const auto& farm = fp.farms[f];
    const auto xs = cells_touching(farm.rect.x, farm.rect.x1(), grid.cell_size, grid.cells_x);
    const auto ys = cells_touching(farm.rect.y, farm.rect.y1(), grid.cell_size, grid.cells_y);
    for (int j = ys.first; j <= ys.last; ++j)
      for (int i = xs.first; i <= xs.last; ++i) {
        const double a = overlap_area(farm.rect, grid.cell_rect(i, j));
        if (a <= 0.0) continue;
        for (int l = std::max(0, farm.start_layer); l <= std::min(grid.layers - 1, farm.end_layer); ++l) {
          const auto c = grid.index(l, j, i);
          occ.eta_farm[c] += a / cell_area;
          if (a > best[c]) {
            best[c] = a;
            occ.farm[c] = static_cast<int>(f);
          }
        }
      }
  }
  for (std::size_t c = 0; c < occ.eta_farm.size(); ++c) {
    double& e = occ.eta_farm[c];
    if (e < kFractionSnap) {
      e = 0.0;
      occ.farm[c] = -1;
    } else if (e > 1.0 - kFractionSnap) {
      e = 1.0;
    }
  }

  std::vector<double> block_power(fp.blocks.size());
  for (std::size_t b = 0; b < fp.blocks.size(); ++b)
    block_power[b] = fp.blocks[b].power + fp.blocks[b].leakage_ref;
  r.power = distribute_power(fp, grid, block_power);
  return r;
}

double resistance(double h, double k, double area) {
  if (!(k > 0.0)) throw DomainError("resistance: conductivity must be > 0");
  if (!(area > 0.0)) throw DomainError("resistance: cross-section must be > 0");
  if (h < 0.0) throw DomainError("resistance: length must be >= 0");
  return h / (k * area);
}

double composite_resistance(double h, double area, double k_farm, double eta_farm, double k_si,
                            double eta_si, CompositeMode mode) {
  if (!(eta_farm > 0.0) && !(eta_si > 0.0))
    throw DomainError("composite resistance: both material fractions are zero");
  if (mode == CompositeMode::parallel) {
    double k_eff = 0.0;
    if (eta_farm > 0.0) k_eff += k_farm * eta_farm;
    if (eta_si > 0.0) k_eff += k_si * eta_si;
    return resistance(h, k_eff, area);
  }
  double r = 0.0;
  if (eta_farm > 0.0) r += resistance(h, k_farm * eta_farm, area);
  if (eta_si > 0.0) r += resistance(h, k_si * eta_si, area);
  return r;
}

double composite_lateral_resistance(const CellComposition& c, double cell_size, double thickness,
                                    CompositeMode mode) {
  return composite_resistance(cell_size, cell_size * thickness, c.k_farm_lateral, c.eta_farm, c.k_si,
                              c.eta_si, mode);
}

double composite_vertical_resistance(const CellComposition& c, double cell_size, double thickness,
                                     CompositeMode mode) {
  return composite_resistance(thickness, cell_size * cell_size, c.k_metal, c.eta_farm, c.k_si,
                              c.eta_si, mode);
}

CellComposition cell_composition(const Stack& stack, const Floorplan& fp,
                                 const CellOccupancy& occ, std::size_t cell) {
  const int layer = static_cast<int>(cell / occ.grid.cells_per_layer());
  CellComposition c;
  c.k_si = stack.layers[layer].k;
  c.eta_farm = occ.eta_farm[cell];
  c.eta_si = occ.eta_si(cell);
  c.k_farm_lateral = c.k_si;
  c.k_metal = c.k_si;
  if (const int f = occ.farm[cell]; f >= 0) {
    const auto& farm = fp.farms[f];
    // Vias land on metal at the end layer, which removes the lateral blockage.
    c.k_farm_lateral = layer == farm.end_layer ? c.k_si : farm.k_farm;
    c.k_metal = farm.k_metal;
  }
  return c;
}

ConductanceNetwork build_network(const Stack& stack, const Floorplan& fp, const CellOccupancy& occ) {
  const auto& g = occ.grid;
  const auto n = g.size();
  const auto mode = stack.tech.composite;
  ConductanceNetwork net;
  net.grid = g;
  net.east.assign(n, 0.0);
  net.north.assign(n, 0.0);
  net.up.assign(n, 0.0);
  net.ambient.assign(n, 0.0);
  net.r_lateral.resize(n);
  net.r_vertical.resize(n);

  for (std::size_t c = 0; c < n; ++c) {
    const int layer = static_cast<int>(c / g.cells_per_layer());
    const double t = stack.layers[layer].thickness;
    const auto comp = cell_composition(stack, fp, occ, c);
    net.r_lateral[c] = composite_lateral_resistance(comp, g.cell_size, t, mode);
    net.r_vertical[c] = composite_vertical_resistance(comp, g.cell_size, t, mode);
  }

  double r_bond = 0.0;
  if (stack.tech.bond_thickness > 0.0) {
    const auto k_bond = stack.materials.find(stack.tech.bond_material);
    if (!k_bond) throw DataError("unknown bond material '" + stack.tech.bond_material + "'");
    r_bond = resistance(stack.tech.bond_thickness, *k_bond, g.cell_area());
  }
  const double g_amb = 1.0 / (stack.tech.package_resistance * static_cast<double>(g.cells_per_layer()));

  for (int l = 0; l < g.layers; ++l)
    for (int j = 0; j < g.cells_y; ++j)
      for (int i = 0; i < g.cells_x; ++i) {
        const auto c = g.index(l, j, i);
        if (i + 1 < g.cells_x) {
          const auto e = g.index(l, j, i + 1);
          net.east[c] = 1.0 / (0.5 * net.r_lateral[c] + 0.5 * net.r_lateral[e]);
        }
        if (j + 1 < g.cells_y) {
          const auto nn = g.index(l, j + 1, i);
          net.north[c] = 1.0 / (0.5 * net.r_lateral[c] + 0.5 * net.r_lateral[nn]);
        }
        if (l + 1 < g.layers) {
          const auto u = g.index(l + 1, j, i);
          net.up[c] = 1.0 / (0.5 * net.r_vertical[c] + 0.5 * net.r_vertical[u] + r_bond);
        }
        if (l == 0) net.ambient[c] = g_amb;
      }
  return net;
}

double ConductanceNetwork::conductance(std::size_t a, std::size_t b) const {
  if (a == b) return 0.0;
  if (a > b) std::swap(a, b);
  const auto cpl = grid.cells_per_layer();
  const std::size_t cx = static_cast<std::size_t>(grid.cells_x);
  if (b == a + 1 && (a % cx) + 1 < cx) return east[a];
  if (b == a + cx && (a % cpl) + cx < cpl) return north[a];
  if (b == a + cpl) return up[a];
  return 0.0;
}

double ConductanceNetwork::diagonal(std::size_t c) const {
  const auto cpl = grid.cells_per_layer();
  const std::size_t cx = static_cast<std::size_t>(grid.cells_x);
  double d = east[c] + north[c] + up[c] + ambient[c];
  if (c % cx != 0) d += east[c - 1];
  if ((c % cpl) >= cx) d += north[c - cx];
  if (c >= cpl) d += up[c - cpl];
  return d;
}

void ConductanceNetwork::multiply(const std::vector<double>& x, std::vector<double>& y) const {
  const auto n = grid.size();
  const auto cpl = grid.cells_per_layer();
  const std::size_t cx = static_cast<std::size_t>(grid.cells_x);
  y.resize(n);
  for (std::size_t c = 0; c < n; ++c) {
    const double xc = x[c];
    double acc = ambient[c] * xc;
    if (c % cx != 0) acc += east[c - 1] * (xc - x[c - 1]);
    if (east[c] != 0.0) acc += east[c] * (xc - x[c + 1]);
    if ((c % cpl) >= cx) acc += north[c - cx] * (xc - x[c - cx]);
    if (north[c] != 0.0) acc += north[c] * (xc - x[c + cx]);
    if (c >= cpl) acc += up[c - cpl] * (xc - x[c - cpl]);
    if (up[c] != 0.0) acc += up[c] * (xc - x[c + cpl]);
    y[c] = acc;
  }
}

}  // namespace tsvfarm
