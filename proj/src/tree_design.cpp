#include "gridtopo/tree_design.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "enumeration.hpp"
#include "gridtopo/error.hpp"
#include "gridtopo/graph.hpp"

namespace gridtopo {

namespace {

constexpr double kBoundSlack = 1e-9;

void require_spanning_tree(const Network& network, const Topology& tree) {
  tree.check_indices(network);
  if (tree.size() != network.node_count() - 1 || !is_connected(network, tree.edges()))
    throw Error(ErrorKind::invalid_argument, "edge set is not a spanning tree");
}

void require_phase_weights(const CostMatrices& cost) {
  if (cost.phase_weights_zero())
    throw Error(ErrorKind::infeasible,
                "phase weights are all zero; every topology has the same cost");
}

// Row sums of the pair weights, excluding the diagonal.
std::vector<double> weight_totals(const CostMatrices& cost) {
  const int n = cost.node_count();
  std::vector<double> totals(n, 0.0);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) totals[i] += cost.pair_weight(i, j);
  return totals;
}

// min over i of the sum of the floor(N/2) smallest w_ij, j != i.
double half_weight_minimum(const CostMatrices& cost) {
  const int n = cost.node_count();
  const int half = n / 2;
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> row;
  for (int i = 0; i < n; ++i) {
    row.clear();
    for (int j = 0; j < n; ++j)
      if (j != i) row.push_back(cost.pair_weight(i, j));
    std::partial_sort(row.begin(), row.begin() + half, row.end());
    best = std::min(best, std::accumulate(row.begin(), row.begin() + half, 0.0));
  }
  return best;
}

}  // namespace

std::uint64_t binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t result = 1;
  for (int i = 1; i <= k; ++i) {
    // result * (n - k + i) / i is exact at every step.
    const std::uint64_t factor = static_cast<std::uint64_t>(n - k + i);
    if (result > std::numeric_limits<std::uint64_t>::max() / factor)
      return std::numeric_limits<std::uint64_t>::max();
    result = result * factor / static_cast<std::uint64_t>(i);
  }
  return result;
}

double tree_cost_by_paths(const Network& network, const Topology& tree,
                          const CostMatrices& cost) {
  require_spanning_tree(network, tree);
  const int n = network.node_count();
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (int e : tree.edges()) {
    const Edge& edge = network.edge(e);
    adj[edge.from].push_back({edge.to, 1.0 / edge.susceptance});
    adj[edge.to].push_back({edge.from, 1.0 / edge.susceptance});
  }
  double total = 0.0;
  std::vector<double> dist(n);
  std::vector<int> stack;
  for (int source = 0; source < n; ++source) {
    std::fill(dist.begin(), dist.end(), -1.0);
    dist[source] = 0.0;
    stack.assign(1, source);
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (auto [v, len] : adj[u]) {
        if (dist[v] < 0.0) {
          dist[v] = dist[u] + len;
          stack.push_back(v);
        }
      }
    }
    for (int j = source + 1; j < n; ++j) total += cost.pair_weight(source, j) * dist[j];
  }
  return total;
}

TreeDesignResult design_tree(const Network& network, const CostMatrices& cost) {
  require_phase_weights(cost);
  TreeDesignResult best;
  for (int root = 0; root < network.node_count(); ++root) {
    Topology tree = shortest_path_tree(network, root);
    const double c =
        topology_cost(cost, LaplacianView::from_network(network, tree.edges()));
    if (best.root < 0 || detail::strictly_better(c, best.cost)) {
      best.tree = std::move(tree);
      best.root = root;
      best.cost = c;
    }
  }
  try {
    best.gap_bound = gap_bound(network, cost);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::infeasible) throw;
  }
  return best;
}

TreeDesignResult brute_force_tree(const Network& network, const CostMatrices& cost,
                                  std::uint64_t cap) {
  std::vector<int> pool(network.edge_count());
  std::iota(pool.begin(), pool.end(), 0);
  const auto search = detail::best_connected_subset(network, cost, {}, pool,
                                                    network.node_count() - 1, cap);
  TreeDesignResult result;
  result.tree = Topology(search.best);
  result.cost = search.cost;
  result.certified_ratio = 1.0;
  return result;
}

double gap_bound(const Network& network, const CostMatrices& cost) {
  if (cost.node_count() != network.node_count())
    throw Error(ErrorKind::invalid_argument, "cost and network sizes differ");
  const auto totals = weight_totals(cost);
  const double numerator = *std::max_element(totals.begin(), totals.end());
  const double denominator = half_weight_minimum(cost);
  if (!(denominator > 0.0))
    throw Error(ErrorKind::infeasible,
                "gap bound is degenerate: some node has fewer than N/2 positive weights");
  return numerator / denominator;
}

GapCertificate certify_ratio(const Network& network, const CostMatrices& cost,
                             const TreeDesignResult& result, std::uint64_t cap) {
  require_phase_weights(cost);
  const TreeDesignResult optimum = brute_force_tree(network, cost, cap);

  GapCertificate cert;
  cert.median = median_node(network);
  const auto dist = shortest_distances(network, cert.median);
  const double spread = std::accumulate(dist.begin(), dist.end(), 0.0);
  const auto totals = weight_totals(cost);

  cert.design_cost = result.cost;
  cert.optimal_cost = optimum.cost;
  cert.ratio = result.cost / optimum.cost;
  cert.gap_bound = gap_bound(network, cost);
  cert.upper_bound = spread * *std::max_element(totals.begin(), totals.end());
  cert.lower_bound = spread * half_weight_minimum(cost);
  cert.within_gap_bound = cert.ratio <= cert.gap_bound * (1.0 + kBoundSlack);
  cert.below_upper_bound = cert.design_cost <= cert.upper_bound * (1.0 + kBoundSlack);
  cert.above_lower_bound = cert.optimal_cost >= cert.lower_bound * (1.0 - kBoundSlack);
  return cert;
}

}  // namespace gridtopo
