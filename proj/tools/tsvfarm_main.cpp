#include <cstdio>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tsvfarm/commands.hpp"
#include "tsvfarm/design_io.hpp"
#include "tsvfarm/errors.hpp"

namespace {

enum Exit { kOk = 0, kDataError = 1, kSolverError = 2, kInternalError = 3 };

std::vector<double> split_numbers(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw tsvfarm::ConfigError(std::string("bad number '") + item + "' in " + what);
    }
  }
  return out;
}

void print_summary(const char* label, const tsvfarm::StateSummary& s) {
  std::printf("%-8s wl=%.6g m  area=%.6g m2  avgT=%.4f K  peakT=%.4f K  hottest=%s (%.4f K)  core peak=%.4f K\n",
              label, s.wirelength, s.area, s.average, s.peak, s.hottest_block.c_str(), s.hottest_block_t,
              s.core_peak);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Thermal-aware TSV farm placement for 3-D stacks"};
  app.require_subcommand(1);

  std::string design_path, weights_text, values_text, axis_text = "layers";
  std::uint64_t seed = 1;
  double grid_cell = 0.0, preset_ratio = 0.0, lambda = -1.0;
  int outer = 3;
  std::string out_dir;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("design", design_path, "Design file")->required()->check(CLI::ExistingFile);
    sub->add_option("--grid-cell", grid_cell, "Grid cell edge in metres (default: design grid_cell)");
    sub->add_option("--leakage-lambda", lambda, "Leakage temperature coefficient, 1/K");
    sub->add_option("--out-dir", out_dir, "Directory for maps and reports");
  };
  auto add_run = [&](CLI::App* sub) {
    sub->add_option("--seed", seed, "RNG seed")->capture_default_str();
    sub->add_option("--outer-iters", outer, "Stack-level iterations")->capture_default_str()->check(CLI::PositiveNumber);
    sub->add_option("--weights", weights_text, "Cost weights alpha,beta,gamma,delta (default: calibrated)");
    sub->add_option("--preset-ratio", preset_ratio, "Preferred floorplan aspect ratio");
  };

  auto* analyze = app.add_subcommand("analyze", "Solve the thermal field once");
  add_common(analyze);
  auto* optimize = app.add_subcommand("optimize", "Reshape and relocate TSV farms");
  add_common(optimize);
  add_run(optimize);
  auto* sweep = app.add_subcommand("sweep", "Optimize across memory-layer counts or farm conductivities");
  add_common(sweep);
  add_run(sweep);
  sweep->add_option("--axis", axis_text, "layers or k_farm")->check(CLI::IsMember({"layers", "k_farm"}));
  sweep->add_option("--values", values_text, "Comma-separated axis values")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kDataError;
  }

  try {
    tsvfarm::RunOptions opt;
    opt.seed = seed;
    opt.outer_iterations = outer;
    opt.out_dir = out_dir;
    if (grid_cell > 0.0) opt.grid_cell = grid_cell;
    if (lambda >= 0.0) opt.leakage_lambda = lambda;
    if (preset_ratio > 0.0) opt.preset_ratio = preset_ratio;
    if (!weights_text.empty()) {
      auto w = split_numbers(weights_text, "--weights");
      if (w.size() != 4) throw tsvfarm::ConfigError("--weights needs four values alpha,beta,gamma,delta");
      tsvfarm::CostWeights cw;
      cw.alpha = w[0];
      cw.beta = w[1];
      cw.gamma = w[2];
      cw.delta = w[3];
      opt.weights = cw;
    }
    const auto design = tsvfarm::parse_design(design_path);

    if (analyze->parsed()) {
      const auto r = tsvfarm::cmd_analyze(design, opt);
      print_summary("state", r.summary);
      for (const auto& l : r.summary.layers)
        std::printf("layer %d  avg=%.4f K  peak=%.4f K\n", l.layer, l.average, l.peak);
    } else if (optimize->parsed()) {
      const auto r = tsvfarm::cmd_optimize(design, opt);
      print_summary("before", r.before);
      print_summary("after", r.after);
      std::printf("runtime %.2f s, best outer iteration %d\n", r.after.seconds, r.outcome.best_iteration);
    } else {
      const auto axis = axis_text == "layers" ? tsvfarm::SweepAxis::layers : tsvfarm::SweepAxis::k_farm;
      const auto points = tsvfarm::cmd_sweep(design, opt, axis, split_numbers(values_text, "--values"));
      std::fputs(tsvfarm::format_sweep_table(axis, points).c_str(), stdout);
      for (const auto& p : points)
        if (!p.ok) return kSolverError;
    }
    return kOk;
  } catch (const tsvfarm::DataError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kDataError;
  } catch (const tsvfarm::DomainError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kDataError;
  } catch (const tsvfarm::SolverError& e) {
    std::fprintf(stderr, "solver error: %s (residual %.3g W after %d iterations)\n", e.what(), e.residual(),
                 e.iterations());
    return kSolverError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "internal error: %s\n", e.what());
    return kInternalError;
  }
}
