#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "tsvfarm/optimizer.hpp"

namespace tsvfarm {

struct RunOptions {
  std::uint64_t seed = 1;
  std::optional<double> grid_cell;  // overrides tech grid_cell
  int outer_iterations = 3;
  std::optional<CostWeights> weights;  // unset: calibrated from the input
  std::optional<double> preset_ratio;
  std::optional<double> leakage_lambda;  // overrides tech leakage_lambda
  AnnealConfig anneal;  // anneal.seed is replaced by `seed`
  EfficiencyOptions efficiency;
  SolverOptions solver;
  std::filesystem::path out_dir;  // empty: write nothing
};

/// The design with command-line overrides folded into its technology
/// block, so that re-analyzing an emitted file reproduces a run.
Design effective_design(const Design& design, const RunOptions& options);
FlowConfig flow_config(const Design& effective, const RunOptions& options);

struct LayerStats {
  int layer = 0;
  double average = 0.0;
  double peak = 0.0;
};

/// One row of the before/after table.
struct StateSummary {
  double wirelength = 0.0;
  double area = 0.0;
  double average = 0.0;  // whole stack
  double peak = 0.0;
  std::string hottest_block;
  double hottest_block_t = 0.0;
  double core_average = 0.0;
  double core_peak = 0.0;
  double seconds = 0.0;
  std::vector<LayerStats> layers;
};

struct AnalyzeResult {
  TemperatureField field;
  StateSummary summary;
};

/// Single solve (leakage-coupled when lambda > 0). Writes
/// layer_<l>.map and stats.json under out_dir when it is set.
AnalyzeResult cmd_analyze(const Design& design, const RunOptions& options);

struct OptimizeResult {
  Design best;  // effective design carrying the best floorplan
  OptimizeOutcome outcome;
  StateSummary before;
  StateSummary after;
  CostWeights weights;
  CostBreakdown cost_before;
  CostBreakdown cost_after;
  nlohmann::json report;
};

/// Runs the optimizer. With out_dir set writes best.design, report.json,
/// trace.log and before_/after_layer_<l>.map.
OptimizeResult cmd_optimize(const Design& design, const RunOptions& options);

enum class SweepAxis { layers, k_farm };

struct SweepPoint {
  double value = 0.0;
  bool ok = false;
  std::string error;
  StateSummary before;
  StateSummary after;
};

/// Layers axis: keeps the core layer plus the first `value` layers above
/// it. k_farm axis: sets every farm's lateral conductivity. Point i runs
/// with seed + i; failures are recorded and the sweep continues.
std::vector<SweepPoint> cmd_sweep(const Design& design, const RunOptions& options, SweepAxis axis,
                                  const std::vector<double>& values);

/// The design reduced to `memory_layers` layers above the core layer.
Design truncate_layers(const Design& design, int memory_layers);
Design with_farm_conductivity(const Design& design, double k_farm);

/// Whitespace-aligned text table, one row per sweep point.
std::string format_sweep_table(SweepAxis axis, const std::vector<SweepPoint>& points);

nlohmann::json to_json(const StateSummary& s);

}  // namespace tsvfarm
