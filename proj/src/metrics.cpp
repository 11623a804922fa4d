#include "tsvfarm/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "tsvfarm/errors.hpp"

namespace tsvfarm {

void check_weights(const CostWeights& w) {
  if (!(w.beta < 0.0)) throw ConfigError("efficiency weight beta must be negative");
  if (w.alpha < 0.0 || w.gamma < 0.0 || w.delta < 0.0)
    throw ConfigError("weights alpha, gamma, delta must be >= 0");
}

double heat_conduction(double k, double area, double delta_t, double x) {
  if (!(x > 0.0)) throw DomainError("heat conduction: distance must be > 0");
  return k * area * delta_t / x;
}

double conduction_efficiency(double k, double area, double x) {
  if (!(x > 0.0)) throw DomainError("conduction efficiency: distance must be > 0");
  if (area == 0.0) return 0.0;
  return k * area / x;
}

namespace {

// Corridor conductance between two centres along x (or y when `along_y`),
// for the band [lo, hi] on the other axis. Strips of one cell row are series
// paths; strips are in parallel.
double corridor_conductance(const ConductanceNetwork& net, int layer, bool along_y, double from,
                            double to, double lo, double hi) {
  const auto& g = net.grid;
  const int n_path = along_y ? g.cells_y : g.cells_x;
  const int n_band = along_y ? g.cells_x : g.cells_y;
  const auto path = cells_touching(from, to, g.cell_size, n_path);
  const auto band = cells_touching(lo, hi, g.cell_size, n_band);
  double total = 0.0;
  for (int s = band.first; s <= band.last; ++s) {
    const double width = interval_overlap(lo, hi, s * g.cell_size, (s + 1) * g.cell_size);
    if (width <= 0.0) continue;
    double r = 0.0;
    for (int p = path.first; p <= path.last; ++p) {
      const double len = interval_overlap(from, to, p * g.cell_size, (p + 1) * g.cell_size);
      if (len <= 0.0) continue;
      const auto c = along_y ? g.index(layer, p, s) : g.index(layer, s, p);
      r += len * net.r_lateral[c];
    }
    if (r > 0.0) total += width / r;
  }
  return total;
}

}  // namespace

std::vector<AdjacentPair> adjacent_pairs(const Stack& stack, const Floorplan& fp,
                                         const ConductanceNetwork& net, const TemperatureField* field,
                                         const EfficiencyOptions& opt) {
  const double window = opt.adjacency_window > 0.0 ? opt.adjacency_window : net.grid.cell_size;
  std::vector<AdjacentPair> pairs;
  const auto& blocks = fp.blocks;
  for (std::size_t a = 0; a < blocks.size(); ++a)
    for (std::size_t b = a + 1; b < blocks.size(); ++b) {
      const auto& A = blocks[a];
      const auto& B = blocks[b];
      if (A.layer != B.layer) continue;
      const double ox = interval_overlap(A.rect.x, A.rect.x1(), B.rect.x, B.rect.x1());
      const double oy = interval_overlap(A.rect.y, A.rect.y1(), B.rect.y, B.rect.y1());
      const double gx = std::max(B.rect.x - A.rect.x1(), A.rect.x - B.rect.x1());
      const double gy = std::max(B.rect.y - A.rect.y1(), A.rect.y - B.rect.y1());
      bool along_y;
      if (oy > kGeomEps && ox <= kGeomEps && gx > -kGeomEps && gx < window) along_y = false;
      else if (ox > kGeomEps && oy <= kGeomEps && gy > -kGeomEps && gy < window) along_y = true;
      else continue;

      const auto ca = A.rect.center();
      const auto cb = B.rect.center();
      AdjacentPair p;
      p.a = a;
      p.b = b;
      p.layer = A.layer;
      const double t = stack.layers[A.layer].thickness;
      double lo, hi;
      if (along_y) {
        lo = std::max(A.rect.x, B.rect.x);
        hi = std::min(A.rect.x1(), B.rect.x1());
        p.distance = std::abs(cb.y - ca.y);
      } else {
        lo = std::max(A.rect.y, B.rect.y);
        hi = std::min(A.rect.y1(), B.rect.y1());
        p.distance = std::abs(cb.x - ca.x);
      }
      p.shared_length = hi - lo;
      p.cross_section = p.shared_length * t;
      const double from = along_y ? std::min(ca.y, cb.y) : std::min(ca.x, cb.x);
      const double g = corridor_conductance(net, A.layer, along_y, from, from + p.distance, lo, hi);
      p.k_eff = g * p.distance / p.cross_section;
      p.efficiency = conduction_efficiency(p.k_eff, p.cross_section, p.distance);
      pairs.push_back(p);
    }

  if (field && opt.gradient_weighting && !pairs.empty()) {
    std::vector<double> bt(blocks.size());
    for (std::size_t i = 0; i < blocks.size(); ++i)
      bt[i] = region_average(*field, blocks[i].layer, blocks[i].rect);
    double max_dt = 0.0;
    for (const auto& p : pairs) max_dt = std::max(max_dt, std::abs(bt[p.a] - bt[p.b]));
    if (max_dt > 0.0)
      for (auto& p : pairs) p.weight = std::abs(bt[p.a] - bt[p.b]) / max_dt;
  }
  return pairs;
}

double total_efficiency(const Stack& stack, const Floorplan& fp, const ConductanceNetwork& net,
                        const TemperatureField& field, const EfficiencyOptions& opt) {
  double f = 0.0;
  for (const auto& p : adjacent_pairs(stack, fp, net, &field, opt)) f += p.weight * p.efficiency;
  return f;
}

double wirelength(const Floorplan& fp, const std::vector<Net>& nets) {
  double w = 0.0;
  for (const auto& n : nets) {
    const TsvFarm* farm = fp.find_farm(n.farm);
    if (!farm) throw DataError("net references unknown farm '" + n.farm + "'");
    const auto fc = farm->rect.center();
    for (const auto& c : n.clients) {
      const Block* b = fp.find_block(c);
      if (!b) throw DataError("net " + n.farm + " references unknown block '" + c + "'");
      const auto bc = b->rect.center();
      w += std::abs(fc.x - bc.x) + std::abs(fc.y - bc.y);
    }
  }
  return w;
}

double floorplan_area(const Floorplan& fp) { return placement_bounding_box(fp).area(); }

double ratio_penalty(const Floorplan& fp, double ratio_preset) {
  const Rect box = placement_bounding_box(fp);
  if (!(box.h > 0.0)) return 0.0;
  return std::abs(box.w / box.h - ratio_preset);
}

CostBreakdown combine(double area, double f_h, double ratio, double wl, const CostWeights& w) {
  CostBreakdown c{area, f_h, ratio, wl, 0.0};
  c.total = w.alpha * area + w.beta * f_h + w.gamma * ratio + w.delta * wl;
  return c;
}

CostBreakdown cost(const Stack& stack, const Floorplan& fp, const std::vector<Net>& nets,
                   const ConductanceNetwork& net, const TemperatureField& field,
                   const CostWeights& weights, const EfficiencyOptions& opt) {
  return combine(floorplan_area(fp), total_efficiency(stack, fp, net, field, opt),
                 ratio_penalty(fp, weights.ratio_preset), wirelength(fp, nets), weights);
}

}  // namespace tsvfarm
