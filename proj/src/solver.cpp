#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include "tsvfarm/errors.hpp"
#include "tsvfarm/thermal_solver.hpp"

namespace tsvfarm {

namespace {

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double inf_norm(const std::vector<double>& a) {
  double m = 0.0;
  for (double v : a) m = std::max(m, std::abs(v));
  return m;
}

void check_grounded(const ConductanceNetwork& net) {
  const auto& g = net.grid;
  const auto n = g.size();
  const auto cpl = g.cells_per_layer();
  const std::size_t cx = static_cast<std::size_t>(g.cells_x);
  std::vector<char> seen(n, 0);
  std::vector<std::size_t> stack;
  for (std::size_t c = 0; c < n; ++c)
    if (net.ambient[c] > 0.0) {
      seen[c] = 1;
      stack.push_back(c);
    }
  if (stack.empty()) throw SingularSystemError("network has no conductance to ambient");
  auto visit = [&](std::size_t c, double gl) {
    if (gl > 0.0 && !seen[c]) {
      seen[c] = 1;
      stack.push_back(c);
    }
  };
  while (!stack.empty()) {
    const auto c = stack.back();
    stack.pop_back();
    if (c % cx != 0) visit(c - 1, net.east[c - 1]);
    if ((c % cx) + 1 < cx) visit(c + 1, net.east[c]);
    if ((c % cpl) >= cx) visit(c - cx, net.north[c - cx]);
    if ((c % cpl) + cx < cpl) visit(c + cx, net.north[c]);
    if (c >= cpl) visit(c - cpl, net.up[c - cpl]);
    if (c + cpl < n) visit(c + cpl, net.up[c]);
  }
  const auto floating = std::count(seen.begin(), seen.end(), 0);
  if (floating)
    throw SingularSystemError(std::to_string(floating) + " cells have no conductive path to ambient");
}

std::vector<double> block_temperatures(const TemperatureField& field, const Floorplan& fp) {
  std::vector<double> t(fp.blocks.size());
  for (std::size_t b = 0; b < fp.blocks.size(); ++b)
    t[b] = region_average(field, fp.blocks[b].layer, fp.blocks[b].rect);
  return t;
}

}  // namespace

TemperatureField solve_steady_state(const ConductanceNetwork& net, const std::vector<double>& power,
                                    double ambient, const SolverOptions& options,
                                    const TemperatureField* warm) {
  const auto n = net.grid.size();
  if (power.size() != n) throw DomainError("power grid size differs from network");
  check_grounded(net);

  TemperatureField field;
  field.grid = net.grid;
  field.ambient = ambient;

  double total = 0.0;
  for (double p : power) {
    if (p < 0.0) throw DomainError("negative cell power");
    total += p;
  }
  // Work in the rise over ambient; a zero source gives exactly ambient.
  std::vector<double> x(n, 0.0);
  if (total == 0.0) {
    field.t.assign(n, ambient);
    return field;
  }
  if (warm && warm->grid == net.grid)
    for (std::size_t c = 0; c < n; ++c) x[c] = std::max(0.0, warm->t[c] - ambient);

  const double tol = options.relative_tolerance * std::max(total, 1.0);
  const double acceptable = std::max(tol, options.acceptable_tolerance * std::max(total, 1.0));
  const int max_iter = options.max_iterations > 0 ? options.max_iterations : static_cast<int>(100 * n);

  std::vector<double> inv_diag(n);
  for (std::size_t c = 0; c < n; ++c) inv_diag[c] = 1.0 / net.diagonal(c);

  std::vector<double> r(n), z(n), p(n), q(n);
  int it = 0;
  double res = 0.0;
  double last_restart = std::numeric_limits<double>::infinity();
  // Restarted from the true residual whenever the recursive one says done,
  // so the reported residual is never an artefact of drift.
  for (;;) {
    net.multiply(x, q);
    for (std::size_t c = 0; c < n; ++c) r[c] = power[c] - q[c];
    res = inf_norm(r);
    if (res <= tol) break;
    if (res <= acceptable && (it >= max_iter || res > 0.5 * last_restart)) break;
    if (it >= max_iter)
      throw SolverError("conjugate gradients did not converge", res, it);
    last_restart = res;
    for (std::size_t c = 0; c < n; ++c) p[c] = z[c] = r[c] * inv_diag[c];
    double rz = dot(r, z);
    while (it < max_iter) {
      ++it;
      net.multiply(p, q);
      const double alpha = rz / dot(p, q);
      for (std::size_t c = 0; c < n; ++c) {
        x[c] += alpha * p[c];
        r[c] -= alpha * q[c];
      }
      if (inf_norm(r) <= tol) break;
      for (std::size_t c = 0; c < n; ++c) z[c] = r[c] * inv_diag[c];
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t c = 0; c < n; ++c) p[c] = z[c] + beta * p[c];
    }
  }

  field.t.resize(n);
  for (std::size_t c = 0; c < n; ++c) field.t[c] = ambient + std::max(0.0, x[c]);
  field.residual = res;
  field.iterations = it;
  return field;
}

double heat_to_ambient(const ConductanceNetwork& net, const TemperatureField& field) {
  double q = 0.0;
  for (std::size_t c = 0; c < field.t.size(); ++c) q += net.ambient[c] * (field.t[c] - field.ambient);
  return q;
}

double region_average(const TemperatureField& field, int layer, const Rect& r) {
  const auto& g = field.grid;
  if (layer < 0 || layer >= g.layers) throw DomainError("region layer out of range");
  const auto xs = cells_touching(r.x, r.x1(), g.cell_size, g.cells_x);
  const auto ys = cells_touching(r.y, r.y1(), g.cell_size, g.cells_y);
  double wsum = 0.0, tsum = 0.0;
  for (int j = ys.first; j <= ys.last; ++j)
    for (int i = xs.first; i <= xs.last; ++i) {
      const double a = overlap_area(r, g.cell_rect(i, j));
      if (a <= 0.0) continue;
      wsum += a;
      tsum += a * field.at(layer, j, i);
    }
  if (wsum <= 0.0) throw DomainError("empty region");
  return tsum / wsum;
}

CoupledSolution couple_leakage(const Stack& stack, const Floorplan& fp, const ConductanceNetwork& net,
                               const LeakageOptions& opt, const SolverOptions& solver,
                               const TemperatureField* warm) {
  if (opt.lambda < 0.0) throw DomainError("leakage slope must be >= 0");
  const auto& grid = net.grid;
  const double ambient = stack.tech.ambient;

  std::vector<double> block_t(fp.blocks.size(), opt.t_ref);
  if (warm && warm->grid == grid) block_t = block_temperatures(*warm, fp);

  auto powers_for = [&](const std::vector<double>& temps) {
    std::vector<double> p(fp.blocks.size());
    for (std::size_t b = 0; b < fp.blocks.size(); ++b) {
      const auto& blk = fp.blocks[b];
      const double leak = blk.leakage_ref * (1.0 + opt.lambda * (temps[b] - opt.t_ref));
      p[b] = blk.power + std::max(0.0, leak);
    }
    return p;
  };

  CoupledSolution sol;
  sol.block_power = powers_for(block_t);
  sol.field = solve_steady_state(net, distribute_power(fp, grid, sol.block_power), ambient, solver,
                                 warm && warm->grid == grid ? warm : nullptr);
  sol.iterations = 1;

  double last_delta = std::numeric_limits<double>::infinity();
  int growing = 0;
  while (sol.iterations < opt.max_iterations) {
    block_t = block_temperatures(sol.field, fp);
    auto powers = powers_for(block_t);
    auto next = solve_steady_state(net, distribute_power(fp, grid, powers), ambient, solver, &sol.field);
    ++sol.iterations;
    double delta = 0.0;
    for (std::size_t c = 0; c < next.t.size(); ++c)
      delta = std::max(delta, std::abs(next.t[c] - sol.field.t[c]));
    sol.field = std::move(next);
    sol.block_power = std::move(powers);
    if (!std::isfinite(delta))
      throw ThermalRunawayError("leakage iteration produced non-finite temperatures", delta,
                                sol.iterations);
    if (delta < opt.tolerance) break;
    growing = delta > last_delta ? growing + 1 : 0;
    if (growing >= opt.runaway_window)
      throw ThermalRunawayError("thermal runaway: leakage feedback diverges", delta, sol.iterations);
    last_delta = delta;
  }
  return sol;
}

FieldStats field_stats(const TemperatureField& field, const Floorplan& fp, const FieldRegion& region) {
  const auto& g = field.grid;
  FieldStats s;
  std::vector<const Block*> candidates;

  switch (region.kind) {
    case FieldRegion::Kind::stack:
    case FieldRegion::Kind::layer: {
      std::size_t begin = 0, end = g.size();
      if (region.kind == FieldRegion::Kind::layer) {
        if (region.layer < 0 || region.layer >= g.layers) throw DomainError("empty region: bad layer");
        begin = static_cast<std::size_t>(region.layer) * g.cells_per_layer();
        end = begin + g.cells_per_layer();
      }
      if (begin == end) throw DomainError("empty region");
      double sum = 0.0;
      s.peak = -std::numeric_limits<double>::infinity();
      for (std::size_t c = begin; c < end; ++c) {
        s.peak = std::max(s.peak, field.t[c]);
        sum += field.t[c];
      }
      s.average = sum / static_cast<double>(end - begin);
      for (const auto& b : fp.blocks)
        if (region.kind == FieldRegion::Kind::stack || b.layer == region.layer) candidates.push_back(&b);
      break;
    }
    case FieldRegion::Kind::block: {
      const Block* blk = fp.find_block(region.block);
      if (!blk) throw DomainError("empty region: unknown block '" + region.block + "'");
      const auto xs = cells_touching(blk->rect.x, blk->rect.x1(), g.cell_size, g.cells_x);
      const auto ys = cells_touching(blk->rect.y, blk->rect.y1(), g.cell_size, g.cells_y);
      s.peak = -std::numeric_limits<double>::infinity();
      for (int j = ys.first; j <= ys.last; ++j)
        for (int i = xs.first; i <= xs.last; ++i)
          if (overlap_area(blk->rect, g.cell_rect(i, j)) > 0.0) s.peak = std::max(s.peak, field.at(blk->layer, j, i));
      s.average = region_average(field, blk->layer, blk->rect);
      candidates.push_back(blk);
      break;
    }
  }

  for (const Block* b : candidates) {
    const double t = region_average(field, b->layer, b->rect);
    if (s.hottest_block.empty() || t > s.hottest_block_t ||
        (t == s.hottest_block_t && b->name < s.hottest_block)) {
      s.hottest_block = b->name;
      s.hottest_block_t = t;
    }
  }
  return s;
}

void write_thermal_map(std::ostream& os, const TemperatureField& field, int layer) {
  const auto& g = field.grid;
  if (layer < 0 || layer >= g.layers) throw DomainError("map layer out of range");
  char buf[64];
  os << "# tsvfarm thermal map\n";
  os << "# layer " << layer << '\n';
  os << "# cells_x " << g.cells_x << '\n';
  os << "# cells_y " << g.cells_y << '\n';
  std::snprintf(buf, sizeof buf, "%.17g", g.cell_size);
  os << "# cell_size_m " << buf << '\n';
  os << "# units K\n";
  for (int j = 0; j < g.cells_y; ++j) {
    for (int i = 0; i < g.cells_x; ++i) {
      std::snprintf(buf, sizeof buf, "%.2f", field.at(layer, j, i));
      if (i) os << ' ';
      os << buf;
    }
    os << '\n';
  }
}

ThermalMap read_thermal_map(std::istream& is) {
  ThermalMap m;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    if (line[0] == '#') {
      std::string hash, key;
      ls >> hash >> key;
      if (key == "layer") ls >> m.layer;
      else if (key == "cells_x") ls >> m.cells_x;
      else if (key == "cells_y") ls >> m.cells_y;
      else if (key == "cell_size_m") ls >> m.cell_size;
      continue;
    }
    std::vector<double> row;
    double v;
    while (ls >> v) row.push_back(v);
    m.rows.push_back(std::move(row));
  }
  return m;
}

}  // namespace tsvfarm
