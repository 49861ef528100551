#include "gapolyak/stepsize.hpp"

#include <cmath>
#include <stdexcept>

namespace gapolyak {

std::pair<Eigen::MatrixXd, Eigen::VectorXd> build_linear_system(
    const StepSizeSystem& system) {
  if (!system.errors_oracle)
    throw std::invalid_argument(
        "build_linear_system requires errors_oracle (test mode)");
  const int n = system.num_agents();
  Eigen::MatrixXd z(n, n);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < n; ++k) {
    const Eigen::VectorXd& gk = system.gradients[k];
    for (int l = 0; l < n; ++l) {
      z(k, l) = system.two_hop(k, l) * gk.dot(system.gradients[l]);
      c(k) += system.two_hop(k, l) * gk.dot((*system.errors_oracle)[l]);
    }
  }
  return {z, c};
}

std::optional<Eigen::VectorXd> solve_dense(const Eigen::MatrixXd& z,
                                           const Eigen::VectorXd& c) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(
      z, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smax = sv(0);
  const double smin = sv(sv.size() - 1);
  if (smax == 0.0 || smin <= 0.0 || smax / smin >= 1e12) return std::nullopt;
  return Eigen::VectorXd(svd.solve(-c));
}

std::optional<double> alpha_coefficient(const StepSizeSystem& system,
                                        int agent) {
  const Eigen::VectorXd& gk = system.gradients[agent];
  double denom = 0.0;
  for (int l = 0; l < system.num_agents(); ++l) {
    const double zkl = system.two_hop(agent, l) * gk.dot(system.gradients[l]);
    denom += zkl * zkl;
  }
  if (denom <= 0.0) return std::nullopt;
  return system.two_hop(agent, agent) * gk.squaredNorm() / denom;
}

StepSizeVector kaczmarz_iterate(
    const StepSizeSystem& system, const StepSizeVector& mu_prev,
    const std::vector<std::optional<double>>& alphas, bool use_oracle_errors) {
  if (use_oracle_errors && !system.errors_oracle)
    throw std::invalid_argument("oracle mode requires errors_oracle");
  const int n = system.num_agents();
  StepSizeVector mu_next = mu_prev;
  for (int k = 0; k < n; ++k) {
    if (!alphas[k]) continue;
    const Eigen::VectorXd& gk = system.gradients[k];
    double residual_term = 0.0;
    double coupling_term = 0.0;
    for (int l = 0; l < n; ++l) {
      const double bkl = system.two_hop(k, l);
      if (bkl == 0.0) continue;
      residual_term += use_oracle_errors
                           ? bkl * gk.dot((*system.errors_oracle)[l])
                           : bkl * system.gaps(k, l);
      coupling_term += bkl * mu_prev(l) * gk.dot(system.gradients[l]);
    }
    mu_next(k) = mu_prev(k) - (*alphas[k]) * (residual_term + coupling_term);
  }
  return mu_next;
}

StepSizeVector graph_aware_polyak(const StepSizeSystem& system,
                                  int inner_iterations,
                                  const StepSizeVector& mu_prev_outer) {
  if (inner_iterations < 1)
    throw std::invalid_argument("inner_iterations must be >= 1");
  const int n = system.num_agents();
  std::vector<std::optional<double>> alphas(n);
  for (int k = 0; k < n; ++k) alphas[k] = alpha_coefficient(system, k);

  StepSizeVector mu = StepSizeVector::Zero(n);
  for (int t = 0; t < inner_iterations; ++t)
    mu = kaczmarz_iterate(system, mu, alphas, /*use_oracle_errors=*/false);

  for (int k = 0; k < n; ++k)
    mu(k) = alphas[k] ? std::max(mu(k), 0.0) : mu_prev_outer(k);
  return mu;
}

double classic_polyak(double objective_gap, const Eigen::VectorXd& gradient) {
  const double g2 = gradient.squaredNorm();
  if (g2 == 0.0) return 0.0;
  return std::max(objective_gap / g2, 0.0);
}

}  // namespace gapolyak
