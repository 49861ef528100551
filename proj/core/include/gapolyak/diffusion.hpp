#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <vector>

#include "gapolyak/graph.hpp"
#include "gapolyak/problem.hpp"
#include "gapolyak/stepsize.hpp"

namespace gapolyak {

/// Step-size policy for the diffusion recursion.
struct StepPolicy {
  enum class Kind { Fixed, LocalPolyak, Gap };
  Kind kind = Kind::Fixed;
  double fixed_mu = 0.0;
  int inner_iterations = 2;  // T, Gap only

  static StepPolicy fixed(double mu) { return {Kind::Fixed, mu, 0}; }
  static StepPolicy local_polyak() { return {Kind::LocalPolyak, 0.0, 0}; }
  static StepPolicy gap(int inner_iterations) {
    return {Kind::Gap, 0.0, inner_iterations};
  }
};

/// Per-iteration metrics. Communication units: one length-M vector over one
/// edge in one direction = one vector_send; one scalar likewise.
struct TraceRecord {
  int iteration = 0;
  double excess_risk = 0.0;
  double mu_mean = 0.0;
  double mu_min = 0.0;
  double mu_max = 0.0;
  long long scalar_sends = 0;
  long long vector_sends = 0;
};

struct CommLedger {
  long long scalar_sends = 0;
  long long vector_sends = 0;
};

/// State of one diffusion run after iteration `iteration`. Cached gradients
/// and cross objectives always refer to the current (params, sample_indices);
/// cross_objectives(k, l) = J^_k(w_l) with agent k's own sample, defined only
/// where two_hop(k, l) != 0.
struct NetworkState {
  int iteration = 0;
  std::vector<Eigen::VectorXd> params;
  StepSizeVector step_sizes;
  std::vector<int> sample_indices;  // -1 in deterministic mode
  std::vector<Eigen::VectorXd> cached_gradients;
  Eigen::MatrixXd cached_cross_objectives;
};

/// Adapt: g_k = w_k - mu_k * grad_k for every agent.
std::vector<Eigen::VectorXd> adapt_step(
    const std::vector<Eigen::VectorXd>& params,
    const StepSizeVector& step_sizes,
    const std::vector<Eigen::VectorXd>& gradients);

/// Combine: w_k = sum_l a_kl g_l. Counts one vector_send per edge per
/// direction.
std::vector<Eigen::VectorXd> combine_step(
    const std::vector<Eigen::VectorXd>& intermediates,
    const CombinationMatrix& cm, CommLedger& ledger);

/// Two one-hop relay rounds: each agent shares its (w, g) pair with
/// neighbors and forwards received pairs once, so every agent holds the
/// parameters and gradients of its two-hop neighborhood. Refreshes
/// cached_gradients at the current params and fills cross objectives
/// J^_k(w_l) using agent k's own current sample. Counts 2 vector_sends per
/// pair per edge per direction per round.
void relay_two_hop(NetworkState& state, const CombinationMatrix& cm,
                   const RegressionTask& task, bool deterministic_oracles,
                   CommLedger& ledger);

/// Network-average global suboptimality: (1/K) sum_k [J(w_k) - J(w_opt)]
/// where J is the full-batch global objective (1/K) sum_l J_l.
double excess_risk(const RegressionTask& task, const NetworkState& state);

/// Full ATC-diffusion run. All agents start at the zero vector; mu_0 comes
/// from one policy evaluation at the initial state. Each iterate is
/// evaluated once (one sample per agent per iteration, shared across all of
/// that agent's evaluations); the adapt step applies the gradient the
/// step-size was computed from. Deterministic given the seed. Returns one
/// TraceRecord per iteration including iteration 0.
std::vector<TraceRecord> run_atc(const RegressionTask& task,
                                 const CombinationMatrix& cm,
                                 const StepPolicy& policy, int num_iterations,
                                 std::uint64_t rng_seed,
                                 bool deterministic_oracles = false);

}  // namespace gapolyak
