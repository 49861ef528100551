#include "gapolyak/graph.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <sstream>
#include <stdexcept>

namespace gapolyak {

std::vector<std::vector<int>> AdjacencyGraph::neighbor_lists() const {
  std::vector<std::vector<int>> adj(num_agents);
  for (const auto& [a, b] : edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());
  return adj;
}

std::vector<int> AdjacencyGraph::degrees() const {
  std::vector<int> deg(num_agents, 0);
  for (const auto& [a, b] : edges) {
    ++deg[a];
    ++deg[b];
  }
  return deg;
}

bool AdjacencyGraph::has_edge(int a, int b) const {
  if (a > b) std::swap(a, b);
  return std::find(edges.begin(), edges.end(), std::make_pair(a, b)) !=
         edges.end();
}

std::vector<int> AdjacencyGraph::bfs_distances(int source) const {
  std::vector<int> dist(num_agents, -1);
  auto adj = neighbor_lists();
  std::deque<int> queue{source};
  dist[source] = 0;
  while (!queue.empty()) {
    int v = queue.front();
    queue.pop_front();
    for (int u : adj[v]) {
      if (dist[u] < 0) {
        dist[u] = dist[v] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

bool AdjacencyGraph::is_connected() const {
  if (num_agents <= 1) return true;
  auto dist = bfs_distances(0);
  return std::all_of(dist.begin(), dist.end(), [](int d) { return d >= 0; });
}

AdjacencyGraph generate_erdos_renyi(int num_agents, double edge_probability,
                                    std::uint64_t rng_seed) {
  if (num_agents < 1) throw std::invalid_argument("num_agents must be >= 1");
  if (edge_probability <= 0.0 || edge_probability > 1.0)
    throw std::invalid_argument("edge_probability must be in (0, 1]");

  constexpr int kMaxAttempts = 1000;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::mt19937_64 rng(rng_seed + static_cast<std::uint64_t>(attempt));
    std::bernoulli_distribution coin(edge_probability);
    AdjacencyGraph g;
    g.num_agents = num_agents;
    for (int a = 0; a < num_agents; ++a)
      for (int b = a + 1; b < num_agents; ++b)
        if (coin(rng)) g.edges.emplace_back(a, b);
    if (g.is_connected()) return g;
  }
  std::ostringstream msg;
  msg << "generate_erdos_renyi: no connected sample in " << kMaxAttempts
      << " attempts (K=" << num_agents << ", p=" << edge_probability
      << "); edge_probability too low";
  throw std::runtime_error(msg.str());
}

AdjacencyGraph generate_ring(int num_agents) {
  if (num_agents < 3) throw std::invalid_argument("ring requires >= 3 agents");
  AdjacencyGraph g;
  g.num_agents = num_agents;
  for (int a = 0; a + 1 < num_agents; ++a) g.edges.emplace_back(a, a + 1);
  g.edges.emplace_back(0, num_agents - 1);
  return g;
}

AdjacencyGraph generate_complete(int num_agents) {
  if (num_agents < 1) throw std::invalid_argument("num_agents must be >= 1");
  AdjacencyGraph g;
  g.num_agents = num_agents;
  for (int a = 0; a < num_agents; ++a)
    for (int b = a + 1; b < num_agents; ++b) g.edges.emplace_back(a, b);
  return g;
}

CombinationMatrix metropolis_weights(const AdjacencyGraph& graph) {
  if (!graph.is_connected())
    throw std::invalid_argument("metropolis_weights requires a connected graph");
  const int n = graph.num_agents;
  const auto deg = graph.degrees();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [k, l] : graph.edges) {
    const double w = 1.0 / (1.0 + std::max(deg[k], deg[l]));
    a(k, l) = w;
    a(l, k) = w;
  }
  for (int k = 0; k < n; ++k) a(k, k) = 1.0 - (a.row(k).sum() - a(k, k));
  return CombinationMatrix{a, a * a};
}

double second_eigenvalue_modulus(const Eigen::MatrixXd& weights) {
  const int n = static_cast<int>(weights.rows());
  if (n == 1) return 0.0;
  // Deflate the Perron eigenvector (all-ones, eigenvalue 1), then power
  // iterate. Squaring the deflated matrix makes all eigenvalues nonnegative
  // so plain power iteration converges to the largest modulus.
  const Eigen::MatrixXd deflated =
      weights - Eigen::MatrixXd::Constant(n, n, 1.0 / n);
  const Eigen::MatrixXd squared = deflated * deflated;
  Eigen::VectorXd v = Eigen::VectorXd::LinSpaced(n, 1.0, 2.0).normalized();
  double lambda = 0.0;
  for (int it = 0; it < 2000; ++it) {
    Eigen::VectorXd next = squared * v;
    const double norm = next.norm();
    if (norm == 0.0) return 0.0;
    next /= norm;
    const double estimate = v.dot(squared * v);
    if (it > 10 && std::abs(estimate - lambda) <= 1e-15 * std::max(1.0, std::abs(estimate))) {
      lambda = estimate;
      break;
    }
    lambda = estimate;
    v = next;
  }
  return std::sqrt(std::max(lambda, 0.0));
}

std::vector<std::string> validate_combination_matrix(
    const CombinationMatrix& cm, const AdjacencyGraph& graph) {
  std::vector<std::string> violations;
  auto report = [&violations](const std::string& what, double magnitude) {
    std::ostringstream msg;
    msg << what << " (magnitude " << magnitude << ")";
    violations.push_back(msg.str());
  };

  const int n = cm.size();
  const Eigen::MatrixXd& a = cm.weights;
  if (n != graph.num_agents) {
    report("matrix size does not match graph", std::abs(n - graph.num_agents));
    return violations;
  }

  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 0.0) report("weights not symmetric", asym);

  const double row_err =
      (a.rowwise().sum() - Eigen::VectorXd::Ones(n)).cwiseAbs().maxCoeff();
  if (row_err > 1e-12) report("row sums deviate from 1", row_err);
  const double col_err =
      (a.colwise().sum().transpose() - Eigen::VectorXd::Ones(n))
          .cwiseAbs()
          .maxCoeff();
  if (col_err > 1e-12) report("column sums deviate from 1", col_err);

  if (a.minCoeff() < 0.0 || a.maxCoeff() > 1.0)
    report("weight entry outside [0, 1]",
           std::max(-a.minCoeff(), a.maxCoeff() - 1.0));

  double sparsity_err = 0.0;
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l)
      if (k != l && !graph.has_edge(k, l))
        sparsity_err = std::max(sparsity_err, std::abs(a(k, l)));
  if (sparsity_err > 0.0) report("nonzero weight on a non-edge", sparsity_err);

  const double two_hop_err = (cm.two_hop - a * a).cwiseAbs().maxCoeff();
  if (two_hop_err > 1e-14) report("two_hop differs from A*A", two_hop_err);

  const double slem = second_eigenvalue_modulus(a);
  if (slem >= 1.0) report("second eigenvalue modulus not below 1", slem);

  return violations;
}

}  // namespace gapolyak
