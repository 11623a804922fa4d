#include "tsvfarm/optimizer.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <ostream>

#include "tsvfarm/errors.hpp"

namespace tsvfarm {

namespace {

std::string num(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

void check_anneal(const AnnealConfig& c) {
  if (!(c.cooling > 0.0 && c.cooling < 1.0)) throw ConfigError("cooling factor must be in (0,1)");
  if (c.max_moves < 1) throw ConfigError("MAX_MOVES must be >= 1");
  if (c.t_initial && !(*c.t_initial > 0.0)) throw ConfigError("initial temperature must be > 0");
  if (c.t_threshold && !(*c.t_threshold > 0.0)) throw ConfigError("threshold must be > 0");
  if (c.t_initial && c.t_threshold && !(*c.t_initial > *c.t_threshold))
    throw ConfigError("initial temperature must exceed the threshold");
  if (!(c.threshold_fraction > 0.0 && c.threshold_fraction < 1.0))
    throw ConfigError("threshold fraction must be in (0,1)");
  if (!(c.probe_acceptance > 0.0 && c.probe_acceptance < 1.0))
    throw ConfigError("probe acceptance must be in (0,1)");
  if (c.retry_cap < 1) throw ConfigError("retry cap must be >= 1");
}

const char* to_string(MoveKind kind) {
  switch (kind) {
    case MoveKind::reshape: return "reshape";
    case MoveKind::relocate: return "relocate";
    case MoveKind::null: return "null";
  }
  return "?";
}

std::vector<Point> legal_origins(const Stack& stack, const Floorplan& fp, std::size_t farm,
                                 const GridSpec& grid) {
  const auto& f = fp.farms[farm];
  std::vector<Point> out;
  for (int j = 0; j <= grid.cells_y; ++j) {
    const double y = j * grid.cell_size;
    if (y + f.rect.h > stack.tech.height + kGeomEps) break;
    for (int i = 0; i <= grid.cells_x; ++i) {
      const double x = i * grid.cell_size;
      if (x + f.rect.w > stack.tech.width + kGeomEps) break;
      if (x == f.rect.x && y == f.rect.y) continue;
      if (check_farm_placement(stack, fp, farm, {x, y, f.rect.w, f.rect.h}) == MoveStatus::ok)
        out.push_back({x, y});
    }
  }
  return out;
}

Candidate gen_move(const Stack& stack, const Floorplan& fp, const std::vector<std::size_t>& eligible,
                   const GridSpec& grid, RandomSource& rng, int retry_cap) {
  if (eligible.empty()) throw DomainError("gen_move: no eligible farms");
  const auto& candidates = stack.tech.aspect_candidates;
  for (int attempt = 0; attempt < retry_cap; ++attempt) {
    const std::size_t farm = eligible[rng.below(eligible.size())];
    const auto& f = fp.farms[farm];
    const double i = rng.uniform();
    if (i < 0.5) {
      std::vector<double> others;
      const double current = f.aspect_ratio();
      for (double c : candidates)
        if (std::abs(c - current) > 1e-9 * c) others.push_back(c);
      if (others.empty()) continue;
      auto out = reshape_farm(stack, fp, farm, others[rng.below(others.size())]);
      if (out) return {std::move(out.floorplan), MoveKind::reshape, f.name};
    } else {
      const auto origins = legal_origins(stack, fp, farm, grid);
      if (origins.empty()) continue;
      auto out = move_farm(stack, fp, farm, origins[rng.below(origins.size())]);
      if (out) return {std::move(out.floorplan), MoveKind::relocate, f.name};
    }
  }
  return {fp, MoveKind::null, {}};
}

double acceptance_probability(double delta, double temperature) {
  if (delta <= 0.0) return 1.0;
  return std::exp(-delta / temperature);
}

bool accept_move(double delta, double temperature, RandomSource& rng, double* draw) {
  if (delta <= 0.0) {
    if (draw) *draw = -1.0;
    return true;
  }
  const double u = rng.uniform();
  if (draw) *draw = u;
  return u < acceptance_probability(delta, temperature);
}

SaResult sa_placement(const Floorplan& initial, const CostFn& cost, const MoveFn& move,
                      const AnnealSchedule& schedule, RandomSource& rng, std::vector<MoveRecord>* log) {
  if (!(schedule.t_initial > schedule.t_threshold && schedule.t_threshold > 0.0))
    throw ConfigError("annealing needs T_initial > T_threshold > 0");
  if (!(schedule.cooling > 0.0 && schedule.cooling < 1.0)) throw ConfigError("cooling must be in (0,1)");

  SaResult res;
  Floorplan current = initial;
  double current_cost = cost(current);
  res.best = current;
  res.initial_cost = res.best_cost = current_cost;

  int step = 0;
  for (double temp = schedule.t_initial; temp > schedule.t_threshold; temp *= schedule.cooling, ++step) {
    for (int m = 0; m < schedule.max_moves; ++m) {
      Candidate cand = move(current, rng);
      ++res.candidates;
      double delta = 0.0;
      double draw = -1.0;
      bool accepted = true;
      if (cand.kind != MoveKind::null) {
        const double c = cost(cand.floorplan);
        delta = c - current_cost;
        accepted = accept_move(delta, temp, rng, &draw);
        if (accepted) {
          current = std::move(cand.floorplan);
          current_cost = c;
        }
      }
      if (accepted) ++res.accepted;
      if (res.best_cost > current_cost) {
        res.best = current;
        res.best_cost = current_cost;
      }
      res.best_cost_curve.push_back(res.best_cost);
      if (log)
        log->push_back({0, 0, step, cand.kind, cand.farm, delta, temp, draw, accepted, res.best_cost});
    }
  }
  return res;
}

ThermalEvaluator::ThermalEvaluator(const Stack& stack, const std::vector<Net>& nets,
                                   const FlowConfig& flow, const CostWeights& weights)
    : stack_(stack),
      nets_(nets),
      flow_(flow),
      weights_(weights),
      grid_(flow.grid_cell > 0.0 ? make_grid(stack, flow.grid_cell) : make_grid(stack)) {}

TemperatureField ThermalEvaluator::solve(const Floorplan& fp, const TemperatureField* warm) const {
  const auto ras = rasterize(stack_, fp, grid_);
  const auto net = build_network(stack_, fp, ras.occupancy);
  if (flow_.leakage.lambda > 0.0)
    return couple_leakage(stack_, fp, net, flow_.leakage, flow_.solver, warm).field;
  return solve_steady_state(net, ras.power, stack_.tech.ambient, flow_.solver, warm);
}

Evaluation ThermalEvaluator::evaluate(const Floorplan& fp, const TemperatureField* warm) const {
  const auto ras = rasterize(stack_, fp, grid_);
  const auto net = build_network(stack_, fp, ras.occupancy);
  Evaluation e;
  if (flow_.leakage.lambda > 0.0)
    e.field = couple_leakage(stack_, fp, net, flow_.leakage, flow_.solver, warm).field;
  else
    e.field = solve_steady_state(net, ras.power, stack_.tech.ambient, flow_.solver, warm);
  e.cost = cost(stack_, fp, nets_, net, e.field, weights_, flow_.efficiency);
  e.stack = field_stats(e.field, fp);
  e.core = field_stats(e.field, fp, FieldRegion::of_layer(stack_.tech.core_layer));
  return e;
}

CostWeights calibrate_weights(const Stack& stack, const Floorplan& fp, const std::vector<Net>& nets,
                              const ThermalEvaluator& evaluator, const Evaluation& initial,
                              std::uint64_t seed, int probes) {
  CostWeights w;
  const double area = floorplan_area(fp);
  const double wl = wirelength(fp, nets);
  w.alpha = area > 0.0 ? 100.0 / area : 0.0;
  w.delta = wl > 0.0 ? 100.0 / wl : 0.0;
  w.gamma = w.alpha * stack.footprint().area();
  w.ratio_preset = stack.tech.width / stack.tech.height;

  const double rise = std::max(initial.core.peak - stack.tech.ambient, 1.0);
  w.beta = initial.cost.f_h > 0.0 ? -rise / initial.cost.f_h : -1.0;
  if (fp.farms.empty() || probes < 1) return w;

  // Least-squares slope of core peak on f_H.
  std::vector<std::size_t> all(fp.farms.size());
  for (std::size_t f = 0; f < all.size(); ++f) all[f] = f;
  Mt64Source rng(seed ^ 0x5bd1e995u);
  std::vector<double> xs{initial.cost.f_h}, ys{initial.core.peak};
  for (int k = 0; k < probes; ++k) {
    Candidate c = gen_move(stack, fp, all, evaluator.grid(), rng);
    if (c.kind == MoveKind::null) continue;
    const Evaluation e = evaluator.evaluate(c.floorplan, &initial.field);
    xs.push_back(e.cost.f_h);
    ys.push_back(e.core.peak);
  }
  const double n = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i] / n;
    my += ys[i] / n;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  if (sxx > 0.0 && sxy < 0.0) w.beta = sxy / sxx;
  return w;
}

LayerPassResult layer_pass(const Stack& stack, const Floorplan& fp, int layer,
                           const ThermalEvaluator& evaluator, const AnnealConfig& anneal,
                           RandomSource& rng, RunTrace* trace, int outer) {
  LayerPassResult out;
  out.floorplan = fp;
  auto& rec = out.record;
  rec.outer = outer;
  rec.layer = layer;

  std::vector<std::size_t> eligible;
  for (std::size_t f = 0; f < fp.farms.size(); ++f)
    if (fp.farms[f].start_layer == layer) eligible.push_back(f);
  rec.eligible = static_cast<int>(eligible.size());

  const Evaluation pre = evaluator.evaluate(fp);
  rec.pre_avg = rec.post_avg = pre.stack.average;
  rec.pre_peak = rec.post_peak = pre.stack.peak;
  rec.initial_cost = rec.best_cost = pre.cost.total;
  if (eligible.empty()) {
    if (trace) trace->passes.push_back(rec);
    return out;
  }

  TemperatureField warm = pre.field;
  CostFn cost_fn = [&](const Floorplan& s) {
    Evaluation e = evaluator.evaluate(s, &warm);
    warm = std::move(e.field);
    return e.cost.total;
  };
  const GridSpec& grid = evaluator.grid();
  MoveFn move_fn = [&](const Floorplan& s, RandomSource& r) {
    return gen_move(stack, s, eligible, grid, r, anneal.retry_cap);
  };

  AnnealSchedule schedule;
  schedule.cooling = anneal.cooling;
  schedule.max_moves = anneal.max_moves;
  if (anneal.t_initial) {
    schedule.t_initial = *anneal.t_initial;
  } else {
    std::vector<double> uphill;
    for (int k = 0; k < anneal.probe_moves; ++k) {
      Candidate c = move_fn(fp, rng);
      if (c.kind == MoveKind::null) continue;
      const double d = cost_fn(c.floorplan) - pre.cost.total;
      if (d > 0.0) uphill.push_back(d);
    }
    if (!uphill.empty()) {
      auto mid = uphill.begin() + static_cast<std::ptrdiff_t>(uphill.size() / 2);
      std::nth_element(uphill.begin(), mid, uphill.end());
      schedule.t_initial = -*mid / std::log(anneal.probe_acceptance);
    } else {
      schedule.t_initial = std::max(1e-9, 1e-3 * std::abs(pre.cost.total));
    }
  }
  schedule.t_threshold = anneal.t_threshold ? *anneal.t_threshold : schedule.t_initial * anneal.threshold_fraction;
  if (!(schedule.t_initial > schedule.t_threshold))
    schedule.t_threshold = schedule.t_initial * anneal.threshold_fraction;
  rec.t_initial = schedule.t_initial;
  rec.t_threshold = schedule.t_threshold;

  std::vector<MoveRecord> log;
  warm = pre.field;
  SaResult sa = sa_placement(fp, cost_fn, move_fn, schedule, rng, trace ? &log : nullptr);

  const Evaluation post = evaluator.evaluate(sa.best);
  rec.post_avg = post.stack.average;
  rec.post_peak = post.stack.peak;
  rec.initial_cost = sa.initial_cost;
  rec.best_cost = sa.best_cost;
  rec.candidates = sa.candidates;
  rec.accepted = sa.accepted;
  rec.best_cost_curve = std::move(sa.best_cost_curve);
  if (trace) {
    for (auto& m : log) {
      m.outer = outer;
      m.layer = layer;
      trace->moves.push_back(std::move(m));
    }
    trace->passes.push_back(rec);
  }
  out.floorplan = std::move(sa.best);
  return out;
}

OptimizeOutcome optimize_stack(const Stack& stack, const Floorplan& fp,
                               const ThermalEvaluator& evaluator, const FlowConfig& flow,
                               const AnnealConfig& anneal) {
  check_anneal(anneal);
  if (flow.outer_iterations < 1) throw ConfigError("outer iterations must be >= 1");
  check_weights(evaluator.weights());

  OptimizeOutcome out;
  out.trace.seed = anneal.seed;
  Mt64Source rng(anneal.seed);

  out.best = fp;
  out.initial_stack_avg = out.best_stack_avg = field_stats(evaluator.solve(fp), fp).average;

  Floorplan current = fp;
  for (int it = 0; it < flow.outer_iterations; ++it) {
    for (int layer = 0; layer < stack.layer_count(); ++layer)
      current = layer_pass(stack, current, layer, evaluator, anneal, rng, &out.trace, it).floorplan;
    const double avg = field_stats(evaluator.solve(current), current).average;
    OuterRecord rec{it, avg, out.best_stack_avg, false};
    if (avg < out.best_stack_avg) {
      out.best = current;
      out.best_stack_avg = avg;
      out.best_iteration = it;
      rec.improved = true;
    }
    rec.best_stack_avg = out.best_stack_avg;
    out.trace.outer.push_back(rec);
  }
  return out;
}

void RunTrace::write(std::ostream& os) const {
  os << "# tsvfarm trace v1 rng=" << Mt64Source::kName << " seed=" << seed << '\n';
  std::size_t mi = 0;
  for (const auto& p : passes) {
    os << "pass outer=" << p.outer << " layer=" << p.layer << " eligible=" << p.eligible
       << " t0=" << num(p.t_initial) << " tmin=" << num(p.t_threshold) << " pre_avg=" << num(p.pre_avg)
       << " pre_peak=" << num(p.pre_peak) << '\n';
    for (; mi < moves.size() && moves[mi].outer == p.outer && moves[mi].layer == p.layer; ++mi) {
      const auto& m = moves[mi];
      os << "move step=" << m.step << " kind=" << to_string(m.kind) << " farm=" << (m.farm.empty() ? "-" : m.farm)
         << " dc=" << num(m.delta) << " temp=" << num(m.temperature) << " draw=" << num(m.draw)
         << " accepted=" << (m.accepted ? 1 : 0) << " best=" << num(m.best_cost) << '\n';
    }
    os << "endpass outer=" << p.outer << " layer=" << p.layer << " candidates=" << p.candidates
       << " accepted=" << p.accepted << " cost0=" << num(p.initial_cost) << " best=" << num(p.best_cost)
       << " post_avg=" << num(p.post_avg) << " post_peak=" << num(p.post_peak) << '\n';
  }
  for (const auto& o : outer)
    os << "outer iteration=" << o.iteration << " stack_avg=" << num(o.stack_avg)
       << " best_stack_avg=" << num(o.best_stack_avg) << " improved=" << (o.improved ? 1 : 0) << '\n';
}

}  // namespace tsvfarm
