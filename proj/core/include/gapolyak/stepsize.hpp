#pragma once

#include <Eigen/Dense>

#include <optional>
#include <utility>
#include <vector>

namespace gapolyak {

/// Per-iteration inputs of the step-size linear system. gaps(k, l) is agent
/// k's own stochastic objective gap J_k(w_opt) - J_k(w_l), evaluated with
/// agent k's current sample at agent l's parameters; entries outside the
/// two-hop neighborhood are irrelevant (masked by two_hop(k, l) == 0).
/// errors_oracle holds the true errors w_opt - w_l and exists only in test
/// mode; the production rule never reads it.
struct StepSizeSystem {
  Eigen::MatrixXd two_hop;                   // K x K, entries b_kl
  std::vector<Eigen::VectorXd> gradients;    // K gradients, length M
  Eigen::MatrixXd gaps;                      // K x K
  std::optional<std::vector<Eigen::VectorXd>> errors_oracle;

  int num_agents() const { return static_cast<int>(gradients.size()); }
};

/// Per-agent step-sizes; nonnegative after the final clamp.
using StepSizeVector = Eigen::VectorXd;

/// Test-mode construction from true errors: Z_kl = b_kl * g_k'g_l and
/// c_k = sum_l b_kl * g_k' (w_opt - w_l). The optimal step-size vector
/// solves Z u = -c. Throws if errors_oracle is absent.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> build_linear_system(
    const StepSizeSystem& system);

/// Direct dense solve of Z u = -c. Returns nullopt when Z is numerically
/// singular (condition estimate above 1e12).
std::optional<Eigen::VectorXd> solve_dense(const Eigen::MatrixXd& z,
                                           const Eigen::VectorXd& c);

/// Relaxation coefficient alpha_k = b_kk |g_k|^2 / sum_l (b_kl g_k'g_l)^2.
/// nullopt when the denominator vanishes (g_k == 0): the agent skips the
/// update and keeps its previous step-size.
std::optional<double> alpha_coefficient(const StepSizeSystem& system,
                                        int agent);

/// One simultaneous (Jacobi-style) sweep over all agents:
///   mu_k <- mu_k - alpha_k sum_l b_kl r_kl - alpha_k sum_l b_kl mu_l g_k'g_l
/// with r_kl = g_k'(w_opt - w_l) in oracle mode and r_kl = gaps(k, l) in
/// production mode. Agents without a valid alpha carry mu through unchanged.
StepSizeVector kaczmarz_iterate(
    const StepSizeSystem& system, const StepSizeVector& mu_prev,
    const std::vector<std::optional<double>>& alphas, bool use_oracle_errors);

/// The graph-aware Polyak rule: alpha computed once, then inner_iterations
/// production-mode sweeps from the zero vector, final entries clamped at 0.
/// Zero-gradient agents inherit mu_prev_outer.
StepSizeVector graph_aware_polyak(const StepSizeSystem& system,
                                  int inner_iterations,
                                  const StepSizeVector& mu_prev_outer);

/// Classic single-agent Polyak step (J(w) - J(w_opt)) / |grad|^2, clamped
/// at 0 for negative stochastic gaps; 0 for a zero gradient.
double classic_polyak(double objective_gap, const Eigen::VectorXd& gradient);

}  // namespace gapolyak
