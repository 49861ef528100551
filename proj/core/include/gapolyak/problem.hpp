#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

namespace gapolyak {

/// Per-agent linear regression data: targets follow
/// gamma_{k,n} = h_{k,n}' w_true + nu_{k,n} with nu ~ N(0, noise_sigma^2).
/// optimal_values stores J_k(w_true), the known minimum-value input to the
/// Polyak-style rules (exactly zero when noise_sigma == 0).
struct RegressionTask {
  int num_agents = 0;
  int dim = 0;
  int samples_per_agent = 0;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;
  std::vector<Eigen::MatrixXd> features;  // per agent, N x M
  std::vector<Eigen::VectorXd> targets;   // per agent, length N
  Eigen::VectorXd true_param;             // length M
  std::vector<double> optimal_values;     // J_k(w_true)
};

/// Single-sample objective value and gradient for one agent.
struct OracleSample {
  int agent = 0;
  int sample_index = 0;
  double objective_value = 0.0;
  Eigen::VectorXd gradient;
};

/// Features and the true parameter are drawn i.i.d. standard normal; noise
/// is N(0, noise_sigma^2). Same seed reproduces the task bit for bit.
RegressionTask generate_regression_task(int num_agents, int dim,
                                        int samples_per_agent,
                                        double noise_sigma,
                                        std::uint64_t rng_seed);

/// Loss of the single sample n: 0.5 * (gamma - h'w)^2, gradient
/// -h * (gamma - h'w).
OracleSample stochastic_oracle(const RegressionTask& task, int agent,
                               const Eigen::VectorXd& w, int sample_index);

/// Batch objective J_k(w) = (1/2N) sum_n (gamma_{k,n} - h_{k,n}'w)^2.
double full_objective(const RegressionTask& task, int agent,
                      const Eigen::VectorXd& w);

Eigen::VectorXd full_gradient(const RegressionTask& task, int agent,
                              const Eigen::VectorXd& w);

/// Largest eigenvalue of (1/N) H_k' H_k, the exact smoothness constant of
/// the quadratic J_k. Diagnostic only; the practical rule never uses it.
double smoothness_constant(const RegressionTask& task, int agent);

/// Text dump/load for cross-implementation reproducibility. One file:
/// a header line with K/M/N/sigma/seed, then one row per (agent, sample).
void save_task_csv(const RegressionTask& task, const std::string& path);
RegressionTask load_task_csv(const std::string& path);

}  // namespace gapolyak
