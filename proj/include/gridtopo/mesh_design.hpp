#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "gridtopo/cost.hpp"
#include "gridtopo/network.hpp"
#include "gridtopo/tree_design.hpp"

namespace gridtopo {

struct AugmentationStep {
  int edge = -1;
  double cost = 0.0;  // Tr(L_w L_b^+) after adding `edge`
};

struct MeshDesignResult {
  Topology edges;
  Topology seed;
  std::vector<AugmentationStep> trace;  // empty for brute-force results
  double cost = 0.0;
  double h2_squared = 0.0;
  /// Largest relative gap between a rank-one delta and the recomputed
  /// delta; only filled when GreedyOptions::verify_deltas is set.
  std::optional<double> max_delta_discrepancy;
};

/// Dense inverse of the reduced susceptance Laplacian (reference node 0) for
/// a growing edge set, with Sherman-Morrison updates per added edge.
class ReducedInverseState {
 public:
  ReducedInverseState(const Network& network, const CostMatrices& cost,
                      const Topology& edges);

  /// Exact change of Tr(Lhat_w Lhat_b^-1) if `edge_index` were added:
  ///   -b (z' Lhat_w z) / (1 + b a'z),  z = Lhat_b^-1 a,  a = e_i - e_j.
  double delta(int edge_index) const;

  void add(int edge_index);
  /// Rebuilds the inverse and the cost from scratch.
  void refactor();

  double cost() const { return cost_; }
  const Eigen::MatrixXd& inverse() const { return inverse_; }
  const std::vector<int>& edges() const { return edges_; }
  int updates_since_refactor() const { return updates_; }

 private:
  Eigen::VectorXd incidence(int edge_index) const;

  const Network* network_;
  Eigen::MatrixXd lw_hat_;
  Eigen::MatrixXd inverse_;
  std::vector<int> edges_;
  double cost_ = 0.0;
  int updates_ = 0;
};

double rank_one_cost_delta(const ReducedInverseState& state, int edge_index);

struct GreedyOptions {
  bool verify_deltas = false;
  int refactor_every = 25;
};

/// Adds k - |seed| candidate edges to `seed`, one at a time, each the
/// candidate with the most negative delta; ties within 1e-12 go to the
/// smaller edge index.
MeshDesignResult greedy_augment(const Network& network, const CostMatrices& cost,
                                const Topology& seed, int k,
                                const GreedyOptions& options = {});

/// Rooted-tree design followed by greedy augmentation up to k edges.
MeshDesignResult design_mesh(const Network& network, const CostMatrices& cost, int k,
                             const GreedyOptions& options = {});

/// With a seed tree: best (k - |seed|)-subset added to it. Without: best
/// connected k-subset of all candidates. Lexicographic tie-break.
MeshDesignResult brute_force_mesh(const Network& network, const CostMatrices& cost, int k,
                                  const std::optional<Topology>& seed_tree = std::nullopt,
                                  std::uint64_t cap = kDefaultEnumerationCap);

}  // namespace gridtopo
