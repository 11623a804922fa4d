#include "tsvfarm/commands.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "tsvfarm/design_io.hpp"
#include "tsvfarm/errors.hpp"

namespace tsvfarm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

StateSummary summarize(const Design& d, const TemperatureField& field) {
  StateSummary s;
  s.wirelength = wirelength(d.floorplan, d.nets);
  s.area = floorplan_area(d.floorplan);
  const auto whole = field_stats(field, d.floorplan);
  s.average = whole.average;
  s.peak = whole.peak;
  s.hottest_block = whole.hottest_block;
  s.hottest_block_t = whole.hottest_block_t;
  const auto core = field_stats(field, d.floorplan, FieldRegion::of_layer(d.stack.tech.core_layer));
  s.core_average = core.average;
  s.core_peak = core.peak;
  for (int l = 0; l < d.stack.layer_count(); ++l) {
    const auto st = field_stats(field, d.floorplan, FieldRegion::of_layer(l));
    s.layers.push_back({l, st.average, st.peak});
  }
  return s;
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw DataError("cannot create output directory '" + dir.string() + "': " + ec.message());
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw DataError("cannot write '" + p.string() + "'");
  return os;
}

void write_maps(const fs::path& dir, const std::string& prefix, const TemperatureField& field) {
  for (int l = 0; l < field.grid.layers; ++l) {
    auto os = open_out(dir / (prefix + "layer_" + std::to_string(l) + ".map"));
    write_thermal_map(os, field, l);
  }
}

json weights_json(const CostWeights& w) {
  return {{"alpha", w.alpha}, {"beta", w.beta}, {"gamma", w.gamma}, {"delta", w.delta},
          {"ratio_preset", w.ratio_preset}};
}

json cost_json(const CostBreakdown& c) {
  return {{"area", c.area}, {"f_h", c.f_h}, {"ratio_penalty", c.ratio_penalty},
          {"wirelength", c.wirelength}, {"total", c.total}};
}

json config_json(const Design& d, const RunOptions& o, const FlowConfig& flow, const GridSpec& grid) {
  const auto& a = o.anneal;
  json anneal = {{"cooling", a.cooling},
                 {"max_moves", a.max_moves},
                 {"probe_moves", a.probe_moves},
                 {"probe_acceptance", a.probe_acceptance},
                 {"threshold_fraction", a.threshold_fraction},
                 {"retry_cap", a.retry_cap}};
  anneal["t_initial"] = a.t_initial ? json(*a.t_initial) : json("auto");
  anneal["t_threshold"] = a.t_threshold ? json(*a.t_threshold) : json("auto");
  return {{"seed", o.seed},
          {"grid_cell_m", grid.cell_size},
          {"cells_x", grid.cells_x},
          {"cells_y", grid.cells_y},
          {"layers", grid.layers},
          {"core_layer", d.stack.tech.core_layer},
          {"outer_iterations", flow.outer_iterations},
          {"leakage_lambda", flow.leakage.lambda},
          {"leakage_tref_k", flow.leakage.t_ref},
          {"ambient_k", d.stack.tech.ambient},
          {"package_resistance", d.stack.tech.package_resistance},
          {"composite", d.stack.tech.composite == CompositeMode::series ? "series" : "parallel"},
          {"solver_relative_tolerance", flow.solver.relative_tolerance},
          {"adjacency_window_m", flow.efficiency.adjacency_window > 0.0 ? flow.efficiency.adjacency_window
                                                                       : grid.cell_size},
          {"gradient_weighting", flow.efficiency.gradient_weighting},
          {"anneal", anneal}};
}

}  // namespace

json to_json(const StateSummary& s) {
  json layers = json::array();
  for (const auto& l : s.layers) layers.push_back({{"layer", l.layer}, {"average", l.average}, {"peak", l.peak}});
  return {{"wirelength", s.wirelength},       {"area", s.area},
          {"avg_t", s.average},               {"peak_t", s.peak},
          {"hottest_block", s.hottest_block}, {"hottest_block_t", s.hottest_block_t},
          {"core_avg_t", s.core_average},     {"core_peak_t", s.core_peak},
          {"seconds", s.seconds},             {"layers", layers}};
}

Design effective_design(const Design& design, const RunOptions& o) {
  Design d = design;
  if (o.grid_cell) d.stack.tech.grid_cell = *o.grid_cell;
  if (o.leakage_lambda) d.stack.tech.leakage_lambda = *o.leakage_lambda;
  auto problems = validate(d);
  if (!problems.empty()) {
    std::vector<Diagnostic> diags;
    for (const auto& v : problems) diags.push_back({0, v.entity + ": " + v.message});
    throw DataError(std::move(diags));
  }
  make_grid(d.stack);  // rejects a grid that does not tile the footprint
  return d;
}

FlowConfig flow_config(const Design& d, const RunOptions& o) {
  FlowConfig f;
  f.outer_iterations = o.outer_iterations;
  f.grid_cell = d.stack.tech.grid_cell;
  f.leakage.lambda = d.stack.tech.leakage_lambda;
  f.leakage.t_ref = d.stack.tech.leakage_tref;
  f.solver = o.solver;
  f.efficiency = o.efficiency;
  if (f.efficiency.adjacency_window <= 0.0) f.efficiency.adjacency_window = d.stack.tech.adjacency_window;
  return f;
}

AnalyzeResult cmd_analyze(const Design& design, const RunOptions& options) {
  const auto t0 = Clock::now();
  const Design d = effective_design(design, options);
  const ThermalEvaluator ev(d.stack, d.nets, flow_config(d, options), CostWeights{});
  AnalyzeResult r;
  r.field = ev.solve(d.floorplan);
  r.summary = summarize(d, r.field);
  r.summary.seconds = seconds_since(t0);
  if (!options.out_dir.empty()) {
    ensure_dir(options.out_dir);
    write_maps(options.out_dir, "", r.field);
    auto os = open_out(options.out_dir / "stats.json");
    os << json{{"stats", to_json(r.summary)}, {"residual_w", r.field.residual},
               {"solver_iterations", r.field.iterations}}.dump(2)
       << '\n';
  }
  return r;
}

OptimizeResult cmd_optimize(const Design& design, const RunOptions& options) {
  const auto t0 = Clock::now();
  OptimizeResult r;
  const Design d = effective_design(design, options);
  if (d.floorplan.farms.empty()) throw DataError("optimize needs at least one TSV farm");
  const FlowConfig flow = flow_config(d, options);
  AnnealConfig anneal = options.anneal;
  anneal.seed = options.seed;

  ThermalEvaluator ev(d.stack, d.nets, flow, CostWeights{});
  const Evaluation initial = ev.evaluate(d.floorplan);
  r.before = summarize(d, initial.field);
  r.before.seconds = seconds_since(t0);

  const bool calibrated = !options.weights.has_value();
  r.weights = calibrated ? calibrate_weights(d.stack, d.floorplan, d.nets, ev, initial, options.seed) : *options.weights;
  if (options.preset_ratio) r.weights.ratio_preset = *options.preset_ratio;
  check_weights(r.weights);
  ev.set_weights(r.weights);
  r.cost_before = ev.evaluate(d.floorplan, &initial.field).cost;

  const auto t1 = Clock::now();
  r.outcome = optimize_stack(d.stack, d.floorplan, ev, flow, anneal);
  r.best = d;
  r.best.floorplan = r.outcome.best;

  const Evaluation final_eval = ev.evaluate(r.best.floorplan);
  r.cost_after = final_eval.cost;
  r.after = summarize(r.best, final_eval.field);
  r.after.seconds = seconds_since(t1);

  json layers = json::array();
  for (std::size_t l = 0; l < r.before.layers.size(); ++l)
    layers.push_back({{"layer", l},
                      {"before_avg", r.before.layers[l].average},
                      {"after_avg", r.after.layers[l].average},
                      {"before_peak", r.before.layers[l].peak},
                      {"after_peak", r.after.layers[l].peak}});
  json outer = json::array();
  for (const auto& o : r.outcome.trace.outer)
    outer.push_back({{"iteration", o.iteration}, {"stack_avg", o.stack_avg}, {"improved", o.improved}});
  json w = weights_json(r.weights);
  w["calibrated"] = calibrated;

  r.report = {
      {"tool", "tsvfarm"},
      {"rng", {{"name", Mt64Source::kName}, {"seed", options.seed}}},
      {"config", config_json(d, options, flow, ev.grid())},
      {"weights", w},
      {"before", to_json(r.before)},
      {"after", to_json(r.after)},
      {"ratios",
       {{"wirelength", r.before.wirelength > 0.0 ? r.after.wirelength / r.before.wirelength : 1.0},
        {"area", r.before.area > 0.0 ? r.after.area / r.before.area : 1.0}}},
      {"layers", layers},
      {"cost", {{"before", cost_json(r.cost_before)}, {"after", cost_json(r.cost_after)}}},
      {"best_iteration", r.outcome.best_iteration},
      {"outer", outer},
      {"total_seconds", seconds_since(t0)},
  };

  if (!options.out_dir.empty()) {
    ensure_dir(options.out_dir);
    open_out(options.out_dir / "best.design") << emit_design(r.best);
    open_out(options.out_dir / "report.json") << r.report.dump(2) << '\n';
    auto trace = open_out(options.out_dir / "trace.log");
    r.outcome.trace.write(trace);
    write_maps(options.out_dir, "before_", initial.field);
    write_maps(options.out_dir, "after_", final_eval.field);
  }
  return r;
}

Design truncate_layers(const Design& design, int memory_layers) {
  const int core = design.stack.tech.core_layer;
  const int top = core + memory_layers;
  if (memory_layers < 0 || top >= design.stack.layer_count())
    throw DataError("layer count " + std::to_string(memory_layers) + " exceeds the design's stack");
  Design d = design;
  d.stack.layers.resize(static_cast<std::size_t>(top) + 1);
  std::erase_if(d.floorplan.blocks, [&](const Block& b) { return b.layer > top; });
  std::erase_if(d.floorplan.farms, [&](const TsvFarm& f) { return f.start_layer > top; });
  for (auto& f : d.floorplan.farms) f.end_layer = std::min(f.end_layer, top);
  for (auto& n : d.nets)
    std::erase_if(n.clients, [&](const std::string& c) { return !d.floorplan.find_block(c); });
  std::erase_if(d.nets, [&](const Net& n) { return n.clients.empty() || !d.floorplan.find_farm(n.farm); });
  return d;
}

Design with_farm_conductivity(const Design& design, double k_farm) {
  Design d = design;
  auto& t = d.stack.tech;
  t.k_farm_min = std::min(t.k_farm_min, k_farm);
  t.k_farm_max = std::max(t.k_farm_max, k_farm);
  for (auto& f : d.floorplan.farms) f.k_farm = k_farm;
  return d;
}

std::vector<SweepPoint> cmd_sweep(const Design& design, const RunOptions& options, SweepAxis axis,
                                  const std::vector<double>& values) {
  if (values.empty()) throw DataError("sweep needs at least one axis value");
  std::vector<SweepPoint> points;
  for (std::size_t i = 0; i < values.size(); ++i) {
    SweepPoint p;
    p.value = values[i];
    try {
      Design d;
      if (axis == SweepAxis::layers) {
        const double v = values[i];
        if (v != std::floor(v)) throw DataError("layer counts must be integers");
        d = truncate_layers(design, static_cast<int>(v));
      } else {
        d = with_farm_conductivity(design, values[i]);
      }
      RunOptions o = options;
      o.seed = options.seed + i;
      if (!options.out_dir.empty()) o.out_dir = options.out_dir / ("point_" + std::to_string(i));
      const auto r = cmd_optimize(d, o);
      p.before = r.before;
      p.after = r.after;
      p.ok = true;
    } catch (const std::exception& e) {
      p.error = e.what();
    }
    points.push_back(std::move(p));
  }
  if (!options.out_dir.empty()) {
    ensure_dir(options.out_dir);
    open_out(options.out_dir / "sweep.tsv") << format_sweep_table(axis, points);
    json arr = json::array();
    for (const auto& p : points) {
      json j = {{"value", p.value}, {"ok", p.ok}};
      if (p.ok) {
        j["before"] = to_json(p.before);
        j["after"] = to_json(p.after);
      } else {
        j["error"] = p.error;
      }
      arr.push_back(j);
    }
    open_out(options.out_dir / "sweep.json")
        << json{{"axis", axis == SweepAxis::layers ? "layers" : "k_farm"}, {"points", arr}}.dump(2) << '\n';
  }
  return points;
}

std::string format_sweep_table(SweepAxis axis, const std::vector<SweepPoint>& points) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s %12s %12s %12s %12s %12s %12s %12s %12s  %s\n",
                axis == SweepAxis::layers ? "layers" : "k_farm", "core_pk_0", "core_pk_1", "core_av_0",
                "core_av_1", "stack_pk_0", "stack_pk_1", "stack_av_0", "stack_av_1", "status");
  os << buf;
  for (const auto& p : points) {
    if (p.ok) {
      std::snprintf(buf, sizeof buf, "%-10g %12.4f %12.4f %12.4f %12.4f %12.4f %12.4f %12.4f %12.4f  ok\n",
                    p.value, p.before.core_peak, p.after.core_peak, p.before.core_average,
                    p.after.core_average, p.before.peak, p.after.peak, p.before.average, p.after.average);
      os << buf;
    } else {
      std::snprintf(buf, sizeof buf, "%-10g ", p.value);
      os << buf << "failed: " << p.error << '\n';
    }
  }
  return os.str();
}

}  // namespace tsvfarm
