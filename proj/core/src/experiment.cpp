#include "gapolyak/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace gapolyak {

namespace {

struct KeyValue {
  std::string key;
  std::string value;
  std::string where;  // "line N" or "override N"
};

[[noreturn]] void config_error(const KeyValue& kv, const std::string& what) {
  throw std::runtime_error("config " + kv.where + ": " + what);
}

std::vector<double> parse_mu_list(const KeyValue& kv,
                                  const std::string& list) {
  std::vector<double> values;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      values.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      config_error(kv, "bad step-size value '" + item + "'");
    }
  }
  if (values.empty()) config_error(kv, "empty step-size list");
  return values;
}

void validate_policy(const KeyValue& kv, const std::string& policy) {
  if (policy == "gap" || policy == "local_polyak" || policy == "all") return;
  if (policy.rfind("fixed:", 0) == 0) {
    auto values = parse_mu_list(kv, policy.substr(6));
    if (values.size() != 1) config_error(kv, "fixed: takes a single value");
    return;
  }
  if (policy.rfind("grid:", 0) == 0) {
    parse_mu_list(kv, policy.substr(5));
    return;
  }
  config_error(kv, "unknown policy '" + policy + "'");
}

void apply(ExperimentConfig& config, const KeyValue& kv) {
  auto as_int = [&kv](int min_value) {
    int v = 0;
    try {
      v = std::stoi(kv.value);
    } catch (const std::exception&) {
      config_error(kv, "'" + kv.value + "' is not an integer");
    }
    if (v < min_value)
      config_error(kv, kv.key + " must be >= " + std::to_string(min_value));
    return v;
  };
  auto as_double = [&kv]() {
    try {
      return std::stod(kv.value);
    } catch (const std::exception&) {
      config_error(kv, "'" + kv.value + "' is not a number");
    }
  };

  if (kv.key == "agents") config.agents = as_int(1);
  else if (kv.key == "dim") config.dim = as_int(1);
  else if (kv.key == "samples_per_agent") config.samples_per_agent = as_int(1);
  else if (kv.key == "iterations") config.iterations = as_int(1);
  else if (kv.key == "runs") config.runs = as_int(1);
  else if (kv.key == "inner_T") config.inner_t = as_int(1);
  else if (kv.key == "seed") config.seed = static_cast<std::uint64_t>(as_int(0));
  else if (kv.key == "noise_sigma") {
    config.noise_sigma = as_double();
    if (config.noise_sigma < 0.0)
      config_error(kv, "noise_sigma must be >= 0");
  } else if (kv.key == "edge_probability") {
    config.edge_probability = as_double();
    if (config.edge_probability <= 0.0 || config.edge_probability > 1.0)
      config_error(kv, "edge_probability must be in (0, 1]");
  } else if (kv.key == "graph") {
    if (kv.value == "erdos_renyi") config.graph = GraphKind::ErdosRenyi;
    else if (kv.value == "ring") config.graph = GraphKind::Ring;
    else if (kv.value == "complete") config.graph = GraphKind::Complete;
    else config_error(kv, "unknown graph '" + kv.value + "'");
  } else if (kv.key == "deterministic_oracles") {
    if (kv.value == "1" || kv.value == "true") config.deterministic_oracles = true;
    else if (kv.value == "0" || kv.value == "false")
      config.deterministic_oracles = false;
    else config_error(kv, "expected true/false");
  } else if (kv.key == "policy") {
    validate_policy(kv, kv.value);
    config.policy = kv.value;
  } else {
    config_error(kv, "unknown key '" + kv.key + "'");
  }
}

KeyValue split_assignment(const std::string& text, const std::string& where) {
  const auto eq = text.find('=');
  if (eq == std::string::npos || eq == 0)
    throw std::runtime_error("config " + where +
                             ": expected key=value, got '" + text + "'");
  auto trim = [](std::string s) {
    const auto a = s.find_first_not_of(" \t");
    const auto b = s.find_last_not_of(" \t");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
  };
  return {trim(text.substr(0, eq)), trim(text.substr(eq + 1)), where};
}

}  // namespace

std::vector<double> default_grid() {
  std::vector<double> grid(12);
  for (int i = 0; i < 12; ++i)
    grid[i] = std::pow(10.0, -3.0 + 4.0 * i / 11.0);
  return grid;
}

ExperimentConfig parse_config(const std::string& path,
                              const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  ExperimentConfig config;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    const auto nonblank = line.find_first_not_of(" \t\r");
    if (nonblank == std::string::npos) continue;
    apply(config, split_assignment(line, "line " + std::to_string(lineno)));
  }
  int idx = 0;
  for (const auto& ov : overrides)
    apply(config, split_assignment(ov, "override " + std::to_string(++idx)));
  return config;
}

ExperimentConfig parse_config_overrides(
    const std::vector<std::string>& overrides) {
  ExperimentConfig config;
  int idx = 0;
  for (const auto& ov : overrides)
    apply(config, split_assignment(ov, "override " + std::to_string(++idx)));
  return config;
}

namespace {

AdjacencyGraph build_graph(const ExperimentConfig& config) {
  switch (config.graph) {
    case GraphKind::ErdosRenyi:
      return generate_erdos_renyi(config.agents, config.edge_probability,
                                  config.seed);
    case GraphKind::Ring:
      return generate_ring(config.agents);
    case GraphKind::Complete:
      return generate_complete(config.agents);
  }
  throw std::logic_error("unknown graph kind");
}

AveragedTrace average_runs(const ExperimentConfig& config,
                           const CombinationMatrix& cm,
                           const StepPolicy& policy, const std::string& name) {
  AveragedTrace avg;
  avg.name = name;
  const int rows = config.iterations + 1;
  avg.excess_risk.assign(rows, 0.0);
  avg.mu_mean.assign(rows, 0.0);
  avg.mu_min.assign(rows, 0.0);
  avg.mu_max.assign(rows, 0.0);
  avg.scalar_sends.assign(rows, 0.0);
  avg.vector_sends.assign(rows, 0.0);
  for (int r = 0; r < config.runs; ++r) {
    const std::uint64_t run_seed =
        config.seed + 7919ull * static_cast<std::uint64_t>(r + 1);
    const auto task = generate_regression_task(
        config.agents, config.dim, config.samples_per_agent,
        config.noise_sigma, run_seed);
    const auto trace = run_atc(task, cm, policy, config.iterations,
                               run_seed + 104729ull,
                               config.deterministic_oracles);
    for (int i = 0; i < rows; ++i) {
      avg.excess_risk[i] += trace[i].excess_risk;
      avg.mu_mean[i] += trace[i].mu_mean;
      avg.mu_min[i] += trace[i].mu_min;
      avg.mu_max[i] += trace[i].mu_max;
      avg.scalar_sends[i] += static_cast<double>(trace[i].scalar_sends);
      avg.vector_sends[i] += static_cast<double>(trace[i].vector_sends);
    }
  }
  const double inv = 1.0 / config.runs;
  for (int i = 0; i < rows; ++i) {
    avg.excess_risk[i] *= inv;
    avg.mu_mean[i] *= inv;
    avg.mu_min[i] *= inv;
    avg.mu_max[i] *= inv;
    avg.scalar_sends[i] *= inv;
    avg.vector_sends[i] *= inv;
  }
  return avg;
}

std::string format_mu(double mu) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", mu);
  return buf;
}

double final_risk(const AveragedTrace& trace) {
  const double v = trace.excess_risk.back();
  return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
}

}  // namespace

void write_trace_csv(const AveragedTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  char buf[32];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return std::string(buf);
  };
  out << "iteration,excess_risk,mu_mean,mu_min,mu_max,scalar_sends,"
         "vector_sends\n";
  for (std::size_t i = 0; i < trace.excess_risk.size(); ++i)
    out << i << ',' << num(trace.excess_risk[i]) << ',' << num(trace.mu_mean[i])
        << ',' << num(trace.mu_min[i]) << ',' << num(trace.mu_max[i]) << ','
        << num(trace.scalar_sends[i]) << ',' << num(trace.vector_sends[i])
        << '\n';
}

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const std::string& out_dir) {
  const auto graph = build_graph(config);
  const auto cm = metropolis_weights(graph);

  ExperimentResult result;
  auto push = [&result](AveragedTrace trace) {
    result.traces.push_back(std::move(trace));
  };

  const bool run_gap = config.policy == "gap" || config.policy == "all";
  std::vector<double> grid;
  if (config.policy == "all") grid = default_grid();
  else if (config.policy.rfind("grid:", 0) == 0)
    grid = parse_mu_list({"policy", config.policy, "policy"},
                         config.policy.substr(5));

  if (run_gap)
    push(average_runs(config, cm, StepPolicy::gap(config.inner_t), "gap"));
  if (config.policy == "local_polyak")
    push(average_runs(config, cm, StepPolicy::local_polyak(), "local_polyak"));
  if (config.policy.rfind("fixed:", 0) == 0) {
    const double mu = std::stod(config.policy.substr(6));
    push(average_runs(config, cm, StepPolicy::fixed(mu),
                      "fixed_" + format_mu(mu)));
  }

  if (!grid.empty()) {
    std::sort(grid.begin(), grid.end());
    AveragedTrace best;
    double best_risk = std::numeric_limits<double>::infinity();
    double best_mu = 0.0;
    for (double mu : grid) {
      auto trace = average_runs(config, cm, StepPolicy::fixed(mu),
                                "fixed_" + format_mu(mu));
      const double risk = final_risk(trace);
      // Strict < with ascending mu breaks ties toward the smaller step.
      if (risk < best_risk) {
        best_risk = risk;
        best_mu = mu;
        best = std::move(trace);
      }
    }
    if (!std::isfinite(best_risk))
      throw std::runtime_error("grid search: every step-size diverged");
    best.name = "fine_tuned";
    result.fine_tuned_mu = best_mu;
    push(std::move(best));
    auto half = average_runs(config, cm, StepPolicy::fixed(best_mu / 2.0),
                             "half_tuned");
    push(std::move(half));
  }

  if (!out_dir.empty()) {
    std::filesystem::create_directories(out_dir);
    for (const auto& trace : result.traces) {
      const std::string path =
          (std::filesystem::path(out_dir) / (trace.name + ".csv")).string();
      write_trace_csv(trace, path);
      result.csv_paths.push_back(path);
    }
  }
  return result;
}

}  // namespace gapolyak
