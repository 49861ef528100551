#include "gapolyak/diffusion.hpp"

#include <limits>
#include <random>
#include <stdexcept>

namespace gapolyak {

namespace {

long long count_edges(const CombinationMatrix& cm) {
  long long edges = 0;
  for (int k = 0; k < cm.size(); ++k)
    for (int l = k + 1; l < cm.size(); ++l)
      if (cm.weights(k, l) != 0.0) ++edges;
  return edges;
}

double evaluate_objective(const RegressionTask& task, int agent,
                          const Eigen::VectorXd& w, int sample_index,
                          bool deterministic) {
  if (deterministic) return full_objective(task, agent, w);
  return stochastic_oracle(task, agent, w, sample_index).objective_value;
}

Eigen::VectorXd evaluate_gradient(const RegressionTask& task, int agent,
                                  const Eigen::VectorXd& w, int sample_index,
                                  bool deterministic) {
  if (deterministic) return full_gradient(task, agent, w);
  return stochastic_oracle(task, agent, w, sample_index).gradient;
}

void refresh_gradients(NetworkState& state, const RegressionTask& task,
                       bool deterministic) {
  const int n = task.num_agents;
  state.cached_gradients.resize(n);
  for (int k = 0; k < n; ++k)
    state.cached_gradients[k] = evaluate_gradient(
        task, k, state.params[k], state.sample_indices[k], deterministic);
}

StepSizeVector compute_step_sizes(const NetworkState& state,
                                  const RegressionTask& task,
                                  const CombinationMatrix& cm,
                                  const StepPolicy& policy,
                                  bool deterministic, CommLedger& ledger) {
  const int n = task.num_agents;
  switch (policy.kind) {
    case StepPolicy::Kind::Fixed:
      return StepSizeVector::Constant(n, policy.fixed_mu);
    case StepPolicy::Kind::LocalPolyak: {
      StepSizeVector mu(n);
      for (int k = 0; k < n; ++k) {
        const double own = evaluate_objective(
            task, k, state.params[k], state.sample_indices[k], deterministic);
        mu(k) = classic_polyak(own - task.optimal_values[k],
                               state.cached_gradients[k]);
      }
      return mu;
    }
    case StepPolicy::Kind::Gap: {
      StepSizeSystem system;
      system.two_hop = cm.two_hop;
      system.gradients = state.cached_gradients;
      system.gaps = Eigen::MatrixXd::Zero(n, n);
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l)
          if (cm.two_hop(k, l) != 0.0)
            system.gaps(k, l) =
                task.optimal_values[k] - state.cached_cross_objectives(k, l);
      // Each inner sweep needs the neighbors' current mu estimates; two
      // one-hop scalar relay rounds per sweep cover the two-hop coupling.
      ledger.scalar_sends += 4 * count_edges(cm) * policy.inner_iterations;
      return graph_aware_polyak(system, policy.inner_iterations,
                                state.step_sizes);
    }
  }
  throw std::logic_error("unknown policy kind");
}

TraceRecord make_record(int iteration, const RegressionTask& task,
                        const NetworkState& state, const CommLedger& ledger) {
  TraceRecord rec;
  rec.iteration = iteration;
  rec.excess_risk = excess_risk(task, state);
  rec.mu_mean = state.step_sizes.mean();
  rec.mu_min = state.step_sizes.minCoeff();
  rec.mu_max = state.step_sizes.maxCoeff();
  rec.scalar_sends = ledger.scalar_sends;
  rec.vector_sends = ledger.vector_sends;
  return rec;
}

}  // namespace

std::vector<Eigen::VectorXd> adapt_step(
    const std::vector<Eigen::VectorXd>& params,
    const StepSizeVector& step_sizes,
    const std::vector<Eigen::VectorXd>& gradients) {
  std::vector<Eigen::VectorXd> intermediates(params.size());
  for (std::size_t k = 0; k < params.size(); ++k)
    intermediates[k] =
        params[k] - step_sizes(static_cast<int>(k)) * gradients[k];
  return intermediates;
}

std::vector<Eigen::VectorXd> combine_step(
    const std::vector<Eigen::VectorXd>& intermediates,
    const CombinationMatrix& cm, CommLedger& ledger) {
  const int n = cm.size();
  if (static_cast<int>(intermediates.size()) != n)
    throw std::invalid_argument("combine_step: size mismatch");
  std::vector<Eigen::VectorXd> out(n);
  for (int k = 0; k < n; ++k) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(intermediates[0].size());
    for (int l = 0; l < n; ++l)
      if (cm.weights(k, l) != 0.0) acc += cm.weights(k, l) * intermediates[l];
    out[k] = acc;
  }
  ledger.vector_sends += 2 * count_edges(cm);
  return out;
}

void relay_two_hop(NetworkState& state, const CombinationMatrix& cm,
                   const RegressionTask& task, bool deterministic_oracles,
                   CommLedger& ledger) {
  const int n = task.num_agents;
  refresh_gradients(state, task, deterministic_oracles);
  state.cached_cross_objectives =
      Eigen::MatrixXd::Constant(n, n, std::numeric_limits<double>::quiet_NaN());
  // Agent k holds w_l for every l with b_kl != 0 after two relay rounds,
  // and evaluates its own loss there with its own current sample.
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      if (cm.two_hop(k, l) != 0.0)
        state.cached_cross_objectives(k, l) =
            evaluate_objective(task, k, state.params[l],
                               state.sample_indices[k], deterministic_oracles);
  // Two rounds, (w, g) pair = 2 vectors, both directions per edge.
  ledger.vector_sends += 8 * count_edges(cm);
}

double excess_risk(const RegressionTask& task, const NetworkState& state) {
  const int n = task.num_agents;
  double optimal = 0.0;
  for (double v : task.optimal_values) optimal += v;
  optimal /= n;
  double total = 0.0;
  for (int k = 0; k < n; ++k) {
    double global = 0.0;
    for (int l = 0; l < n; ++l) global += full_objective(task, l, state.params[k]);
    total += global / n - optimal;
  }
  return total / n;
}

std::vector<TraceRecord> run_atc(const RegressionTask& task,
                                 const CombinationMatrix& cm,
                                 const StepPolicy& policy, int num_iterations,
                                 std::uint64_t rng_seed,
                                 bool deterministic_oracles) {
  if (cm.size() != task.num_agents)
    throw std::invalid_argument("run_atc: combination matrix / task mismatch");
  if (policy.kind == StepPolicy::Kind::Gap && policy.inner_iterations < 1)
    throw std::invalid_argument("run_atc: gap policy requires T >= 1");

  const int n = task.num_agents;
  std::mt19937_64 rng(rng_seed);
  std::uniform_int_distribution<int> pick_sample(0, task.samples_per_agent - 1);
  auto draw_samples = [&](NetworkState& state) {
    for (int k = 0; k < n; ++k)
      state.sample_indices[k] = deterministic_oracles ? -1 : pick_sample(rng);
  };

  NetworkState state;
  state.params.assign(n, Eigen::VectorXd::Zero(task.dim));
  state.step_sizes = StepSizeVector::Zero(n);
  state.sample_indices.assign(n, -1);

  std::vector<TraceRecord> trace;
  trace.reserve(num_iterations + 1);

  // One oracle evaluation per iterate: the gradient computed for the
  // step-size rule at w_i is the one the next adapt step applies, so the
  // step-size always scales the gradient it was derived from (and the K=1
  // stochastic case reduces exactly to Polyak's rule per sample).
  auto evaluate_and_set_step_sizes = [&](CommLedger& ledger) {
    draw_samples(state);
    refresh_gradients(state, task, deterministic_oracles);
    if (policy.kind == StepPolicy::Kind::Gap)
      relay_two_hop(state, cm, task, deterministic_oracles, ledger);
    state.step_sizes = compute_step_sizes(state, task, cm, policy,
                                          deterministic_oracles, ledger);
  };

  // Initial step-size: one policy evaluation at the initial state.
  CommLedger ledger;
  evaluate_and_set_step_sizes(ledger);
  trace.push_back(make_record(0, task, state, ledger));

  for (int i = 1; i <= num_iterations; ++i) {
    ledger = CommLedger{};
    auto intermediates =
        adapt_step(state.params, state.step_sizes, state.cached_gradients);
    state.params = combine_step(intermediates, cm, ledger);
    state.iteration = i;
    evaluate_and_set_step_sizes(ledger);
    trace.push_back(make_record(i, task, state, ledger));
  }
  return trace;
}

}  // namespace gapolyak
