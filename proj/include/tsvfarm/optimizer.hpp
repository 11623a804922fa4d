#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tsvfarm/metrics.hpp"
#include "tsvfarm/random.hpp"
#include "tsvfarm/stack_model.hpp"
#include "tsvfarm/thermal_grid.hpp"
#include "tsvfarm/thermal_solver.hpp"

namespace tsvfarm {

struct AnnealConfig {
  /// Starting temperature in cost units. Unset: chosen so the median uphill
  /// step of `probe_moves` random moves is accepted with `probe_acceptance`.
  std::optional<double> t_initial;
  /// Unset: t_initial * threshold_fraction.
  std::optional<double> t_threshold;
  double threshold_fraction = 0.01;
  double cooling = 0.85;
  int max_moves = 20;
  int probe_moves = 100;
  double probe_acceptance = 0.8;
  int retry_cap = 50;
  std::uint64_t seed = 1;
};

/// Throws ConfigError on out-of-range values.
void check_anneal(const AnnealConfig& config);

struct FlowConfig {
  int outer_iterations = 3;
  double grid_cell = 0.0;  // 0: use the technology grid
  LeakageOptions leakage;  // lambda 0 disables the coupling
  SolverOptions solver;
  EfficiencyOptions efficiency;
};

enum class MoveKind { reshape, relocate, null };
const char* to_string(MoveKind kind);

struct Candidate {
  Floorplan floorplan;
  MoveKind kind = MoveKind::null;
  std::string farm;
};

/// Grid-aligned origins where the farm fits without overlap on any spanned
/// layer, excluding its current origin.
std::vector<Point> legal_origins(const Stack& stack, const Floorplan& floorplan, std::size_t farm,
                                 const GridSpec& grid);

/// Picks a farm from `eligible`, then with i < 1/2 reshapes it to another
/// candidate ratio, otherwise relocates it to a random legal origin. After
/// `retry_cap` illegal attempts returns the input unchanged (null move).
Candidate gen_move(const Stack& stack, const Floorplan& floorplan,
                   const std::vector<std::size_t>& eligible, const GridSpec& grid, RandomSource& rng,
                   int retry_cap = 50);

/// exp(-delta / T) for uphill moves, 1 otherwise.
double acceptance_probability(double delta, double temperature);

/// Downhill (delta <= 0) is always taken without a draw; uphill draws
/// u in [0,1) and accepts when u < exp(-delta / T). `draw` receives u, or
/// -1 when no draw was made.
bool accept_move(double delta, double temperature, RandomSource& rng, double* draw = nullptr);

struct MoveRecord {
  int outer = 0;
  int layer = 0;
  int step = 0;
  MoveKind kind = MoveKind::null;
  std::string farm;
  double delta = 0.0;
  double temperature = 0.0;
  double draw = -1.0;
  bool accepted = false;
  double best_cost = 0.0;
};

struct PassRecord {
  int outer = 0;
  int layer = 0;
  int eligible = 0;
  double t_initial = 0.0;
  double t_threshold = 0.0;
  double pre_avg = 0.0;
  double pre_peak = 0.0;
  double post_avg = 0.0;
  double post_peak = 0.0;
  double initial_cost = 0.0;
  double best_cost = 0.0;
  int candidates = 0;
  int accepted = 0;
  std::vector<double> best_cost_curve;
};

struct OuterRecord {
  int iteration = 0;
  double stack_avg = 0.0;
  double best_stack_avg = 0.0;
  bool improved = false;
};

struct RunTrace {
  std::uint64_t seed = 0;
  std::vector<MoveRecord> moves;
  std::vector<PassRecord> passes;
  std::vector<OuterRecord> outer;

  /// Line-oriented log; doubles are written round-trip exact.
  void write(std::ostream& os) const;
};

struct AnnealSchedule {
  double t_initial = 1.0;
  double t_threshold = 0.01;
  double cooling = 0.85;
  int max_moves = 20;
};

using CostFn = std::function<double(const Floorplan&)>;
using MoveFn = std::function<Candidate(const Floorplan&, RandomSource&)>;

struct SaResult {
  Floorplan best;
  double initial_cost = 0.0;
  double best_cost = 0.0;
  int candidates = 0;
  int accepted = 0;
  std::vector<double> best_cost_curve;  // cost(S_best) after every candidate
};

/// Classic annealing loop: MAX_MOVES candidates per temperature step,
/// geometric cooling until T <= threshold. Returns the best state seen.
SaResult sa_placement(const Floorplan& initial, const CostFn& cost, const MoveFn& move,
                      const AnnealSchedule& schedule, RandomSource& rng,
                      std::vector<MoveRecord>* log = nullptr);

/// Thermal solve plus objective for one floorplan.
struct Evaluation {
  TemperatureField field;
  CostBreakdown cost;
  FieldStats stack;
  FieldStats core;
};

class ThermalEvaluator {
 public:
  ThermalEvaluator(const Stack& stack, const std::vector<Net>& nets, const FlowConfig& flow,
                   const CostWeights& weights);

  const GridSpec& grid() const { return grid_; }
  const CostWeights& weights() const { return weights_; }
  void set_weights(const CostWeights& w) { weights_ = w; }

  /// Steady state, with leakage coupling when lambda > 0.
  TemperatureField solve(const Floorplan& floorplan, const TemperatureField* warm = nullptr) const;
  Evaluation evaluate(const Floorplan& floorplan, const TemperatureField* warm = nullptr) const;

 private:
  const Stack& stack_;
  const std::vector<Net>& nets_;
  FlowConfig flow_;
  CostWeights weights_;
  GridSpec grid_;
};

/// Weights in kelvin-equivalent units: a 1% growth of area or wirelength
/// costs 1, and beta is the fitted slope of core-layer peak temperature
/// against f_H over `probes` random moves of the initial floorplan.
/// Falls back to beta = -(peak rise) / f_H when the fit is degenerate.
CostWeights calibrate_weights(const Stack& stack, const Floorplan& floorplan,
                              const std::vector<Net>& nets, const ThermalEvaluator& evaluator,
                              const Evaluation& initial, std::uint64_t seed, int probes = 32);

struct LayerPassResult {
  Floorplan floorplan;
  PassRecord record;
};

/// Anneals the farms that start on `layer`; the full stack is re-solved for
/// every candidate.
LayerPassResult layer_pass(const Stack& stack, const Floorplan& floorplan, int layer,
                           const ThermalEvaluator& evaluator, const AnnealConfig& anneal,
                           RandomSource& rng, RunTrace* trace = nullptr, int outer = 0);

struct OptimizeOutcome {
  Floorplan best;
  RunTrace trace;
  double initial_stack_avg = 0.0;
  double best_stack_avg = 0.0;
  int best_iteration = -1;  // -1: the input was never beaten
};

/// Outer loop of bottom-up layer passes; keeps the floorplan with the
/// lowest whole-stack average temperature.
OptimizeOutcome optimize_stack(const Stack& stack, const Floorplan& floorplan,
                               const ThermalEvaluator& evaluator, const FlowConfig& flow,
                               const AnnealConfig& anneal);

}  // namespace tsvfarm
