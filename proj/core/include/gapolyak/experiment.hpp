#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "gapolyak/diffusion.hpp"

namespace gapolyak {

enum class GraphKind { ErdosRenyi, Ring, Complete };

/// Experiment settings. Defaults match the reference least-squares setup:
/// 8 agents on an Erdos-Renyi graph, M=10, N=5, noiseless, T=2, 20
/// Monte-Carlo runs of 1000 iterations.
struct ExperimentConfig {
  int agents = 8;
  GraphKind graph = GraphKind::ErdosRenyi;
  double edge_probability = 0.5;
  int dim = 10;
  int samples_per_agent = 5;
  double noise_sigma = 0.0;
  int iterations = 1000;
  int runs = 20;
  int inner_t = 2;
  std::uint64_t seed = 1;
  bool deterministic_oracles = false;
  // "gap", "local_polyak", "fixed:<mu>", "grid:<mu1,mu2,...>" or "all"
  // (gap plus the default grid).
  std::string policy = "all";
};

/// Default fine-tuning grid: 12 log-spaced values spanning 1e-3 to 1e1.
std::vector<double> default_grid();

/// Parses a flat key=value config file ('#' starts a comment). Unknown
/// keys, malformed lines and out-of-range values raise std::runtime_error
/// naming the line number. Overrides (same key=value syntax) are applied
/// after the file.
ExperimentConfig parse_config(const std::string& path,
                              const std::vector<std::string>& overrides = {});
ExperimentConfig parse_config_overrides(
    const std::vector<std::string>& overrides);

/// One named excess-risk curve averaged over Monte-Carlo runs.
struct AveragedTrace {
  std::string name;
  std::vector<double> excess_risk;
  std::vector<double> mu_mean;
  std::vector<double> mu_min;
  std::vector<double> mu_max;
  std::vector<double> scalar_sends;
  std::vector<double> vector_sends;
};

struct ExperimentResult {
  std::vector<AveragedTrace> traces;
  std::vector<std::string> csv_paths;  // parallel to traces when written
  double fine_tuned_mu = 0.0;          // grid policies only
};

/// Averages `runs` seeded repetitions per policy. The graph is generated
/// once from the base seed; task and sample draws vary per run. For grid
/// policies the mu with smallest final averaged excess risk wins (ties
/// toward the smaller mu) and a half-tuned reference is added. Writes one
/// CSV per trace into out_dir when nonempty.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::string& out_dir);

void write_trace_csv(const AveragedTrace& trace, const std::string& path);

/// Renders the averaged curves as a standalone SVG line chart with a
/// log-scale y axis, one legend entry per CSV. Throws on mismatched
/// iteration grids.
void emit_plot(const std::vector<std::string>& csv_paths,
               const std::string& svg_path);

}  // namespace gapolyak
