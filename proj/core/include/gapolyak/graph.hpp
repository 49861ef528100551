#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace gapolyak {

/// Undirected graph over agents 0..num_agents-1. Edges are stored as
/// canonical pairs (a < b); self-loops are never stored, they only appear
/// implicitly as diagonal combination weights.
struct AdjacencyGraph {
  int num_agents = 0;
  std::vector<std::pair<int, int>> edges;

  std::vector<std::vector<int>> neighbor_lists() const;
  std::vector<int> degrees() const;
  bool has_edge(int a, int b) const;
  bool is_connected() const;

  /// BFS hop distances from a source agent (-1 for unreachable).
  std::vector<int> bfs_distances(int source) const;
};

/// Symmetric doubly-stochastic combination weights A together with the
/// two-hop product B = A*A used by the step-size linear system.
struct CombinationMatrix {
  Eigen::MatrixXd weights;
  Eigen::MatrixXd two_hop;

  int size() const { return static_cast<int>(weights.rows()); }
};

/// Samples G(K, p) and resamples with a deterministically advanced seed
/// until the graph is connected. Throws std::runtime_error after 1000
/// disconnected samples.
AdjacencyGraph generate_erdos_renyi(int num_agents, double edge_probability,
                                    std::uint64_t rng_seed);

/// Cycle graph; requires num_agents >= 3.
AdjacencyGraph generate_ring(int num_agents);

AdjacencyGraph generate_complete(int num_agents);

/// Metropolis-Hastings weights: a_kl = 1/(1 + max(deg_k, deg_l)) on edges,
/// diagonal filled so rows sum to one. Symmetric and doubly stochastic for
/// any connected undirected graph.
CombinationMatrix metropolis_weights(const AdjacencyGraph& graph);

/// Diagnostic check of all CombinationMatrix invariants against the graph
/// structure. Returns one human-readable message per violation; empty means
/// valid.
std::vector<std::string> validate_combination_matrix(
    const CombinationMatrix& cm, const AdjacencyGraph& graph);

/// Second-largest eigenvalue modulus of A, estimated by power iteration on
/// A - (1/K) * ones. Strictly below 1 iff the weighted graph is connected.
double second_eigenvalue_modulus(const Eigen::MatrixXd& weights);

}  // namespace gapolyak
