#include "gridtopo/mesh_design.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "enumeration.hpp"
#include "gridtopo/error.hpp"
#include "gridtopo/graph.hpp"

namespace gridtopo {

namespace {

constexpr double kDeltaTieTolerance = 1e-12;

void check_budget(const Network& network, int k) {
  const int n = network.node_count();
  if (k < n - 1 || k > network.edge_count())
    throw Error(ErrorKind::invalid_argument,
                "k = " + std::to_string(k) + " outside [" + std::to_string(n - 1) + ", " +
                    std::to_string(network.edge_count()) + "]");
}

double full_cost(const Network& network, const CostMatrices& cost,
                 const std::vector<int>& edges) {
  return topology_cost(cost, LaplacianView::from_network(network, edges));
}

}  // namespace

ReducedInverseState::ReducedInverseState(const Network& network, const CostMatrices& cost,
                                         const Topology& edges)
    : network_(&network),
      lw_hat_(reduce(cost.phase_laplacian, 0)),
      edges_(edges.edges().begin(), edges.edges().end()) {
  refactor();
}

void ReducedInverseState::refactor() {
  const LaplacianView lap = LaplacianView::from_network(*network_, edges_);
  inverse_ = lap.reduced_inverse();
  cost_ = (inverse_ * lw_hat_).trace();
  updates_ = 0;
}

Eigen::VectorXd ReducedInverseState::incidence(int edge_index) const {
  const Edge& edge = network_->edge(edge_index);
  Eigen::VectorXd a = Eigen::VectorXd::Zero(inverse_.rows());
  // Node 0 is the reference and has no slot.
  if (edge.from != 0) a(edge.from - 1) += 1.0;
  if (edge.to != 0) a(edge.to - 1) -= 1.0;
  return a;
}

double ReducedInverseState::delta(int edge_index) const {
  const double b = network_->edge(edge_index).susceptance;
  const Eigen::VectorXd z = inverse_ * incidence(edge_index);
  const double denom = 1.0 + b * incidence(edge_index).dot(z);
  return -b * z.dot(lw_hat_ * z) / denom;
}

void ReducedInverseState::add(int edge_index) {
  if (std::find(edges_.begin(), edges_.end(), edge_index) != edges_.end())
    throw Error(ErrorKind::invalid_argument,
                "edge " + std::to_string(edge_index) + " already selected");
  const double b = network_->edge(edge_index).susceptance;
  const Eigen::VectorXd a = incidence(edge_index);
  const Eigen::VectorXd z = inverse_ * a;
  const double denom = 1.0 + b * a.dot(z);
  cost_ += -b * z.dot(lw_hat_ * z) / denom;
  inverse_.noalias() -= (b / denom) * z * z.transpose();
  edges_.push_back(edge_index);
  ++updates_;
}

double rank_one_cost_delta(const ReducedInverseState& state, int edge_index) {
  return state.delta(edge_index);
}

MeshDesignResult greedy_augment(const Network& network, const CostMatrices& cost,
                                const Topology& seed, int k, const GreedyOptions& options) {
  check_budget(network, k);
  seed.check_indices(network);
  if (seed.size() > k)
    throw Error(ErrorKind::invalid_argument, "seed already has more than k edges");
  if (!is_connected(network, seed.edges()))
    throw Error(ErrorKind::disconnected, "seed topology is not connected");

  MeshDesignResult result;
  result.seed = seed;
  ReducedInverseState state(network, cost, seed);
  std::vector<char> used(network.edge_count(), 0);
  for (int e : seed.edges()) used[e] = 1;
  if (options.verify_deltas) result.max_delta_discrepancy = 0.0;

  for (int step = seed.size(); step < k; ++step) {
    const double current_exact =
        options.verify_deltas ? full_cost(network, cost, state.edges()) : 0.0;
    int best_edge = -1;
    double best_delta = 0.0;
    for (int e = 0; e < network.edge_count(); ++e) {
      if (used[e]) continue;
      const double d = state.delta(e);
      if (options.verify_deltas) {
        std::vector<int> trial = state.edges();
        trial.push_back(e);
        const double exact = full_cost(network, cost, trial) - current_exact;
        const double denom = std::max(std::abs(exact), 1e-12 * current_exact);
        const double gap = denom > 0.0 ? std::abs(d - exact) / denom : std::abs(d - exact);
        result.max_delta_discrepancy = std::max(*result.max_delta_discrepancy, gap);
      }
      if (best_edge < 0 || d < best_delta - kDeltaTieTolerance) {
        best_edge = e;
        best_delta = d;
      }
    }
    state.add(best_edge);
    used[best_edge] = 1;
    if (options.refactor_every > 0 && state.updates_since_refactor() >= options.refactor_every)
      state.refactor();
    result.trace.push_back({best_edge, state.cost()});
  }

  result.edges = Topology(state.edges());
  const Evaluation eval = evaluate(network, cost, result.edges);
  result.cost = eval.cost;
  result.h2_squared = eval.h2_squared;
  return result;
}

MeshDesignResult design_mesh(const Network& network, const CostMatrices& cost, int k,
                             const GreedyOptions& options) {
  check_budget(network, k);
  const TreeDesignResult tree = design_tree(network, cost);
  return greedy_augment(network, cost, tree.tree, k, options);
}

MeshDesignResult brute_force_mesh(const Network& network, const CostMatrices& cost, int k,
                                  const std::optional<Topology>& seed_tree,
                                  std::uint64_t cap) {
  check_budget(network, k);
  std::vector<int> fixed;
  std::vector<int> pool;
  if (seed_tree) {
    seed_tree->check_indices(network);
    if (seed_tree->size() > k)
      throw Error(ErrorKind::invalid_argument, "seed already has more than k edges");
    fixed.assign(seed_tree->edges().begin(), seed_tree->edges().end());
  }
  for (int e = 0; e < network.edge_count(); ++e)
    if (!seed_tree || !seed_tree->contains(e)) pool.push_back(e);
  const int choose = k - static_cast<int>(fixed.size());
  const auto search = detail::best_connected_subset(network, cost, fixed, pool, choose, cap);

  MeshDesignResult result;
  if (seed_tree) result.seed = *seed_tree;
  result.edges = Topology(search.best);
  const Evaluation eval = evaluate(network, cost, result.edges);
  result.cost = eval.cost;
  result.h2_squared = eval.h2_squared;
  return result;
}

}  // namespace gridtopo
