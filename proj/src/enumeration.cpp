#include "enumeration.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "gridtopo/error.hpp"
#include "gridtopo/graph.hpp"
#include "gridtopo/tree_design.hpp"

namespace gridtopo::detail {

SubsetSearch best_connected_subset(const Network& network, const CostMatrices& cost,
                                   std::span<const int> fixed, std::span<const int> pool,
                                   int choose, std::uint64_t cap) {
  const int n = network.node_count();
  const int p = static_cast<int>(pool.size());
  if (choose < 0 || choose > p)
    throw Error(ErrorKind::invalid_argument,
                "cannot choose " + std::to_string(choose) + " of " + std::to_string(p) +
                    " edges");
  const std::uint64_t total = binomial(p, choose);
  if (total > cap)
    throw Error(ErrorKind::infeasible,
                "enumeration of " + std::to_string(total) + " subsets exceeds cap " +
                    std::to_string(cap));

  // Reduced Lw at reference 0, shared by every evaluation.
  const Eigen::MatrixXd lw_hat = n > 1 ? reduce(cost.phase_laplacian, 0) : Eigen::MatrixXd();

  SubsetSearch out;
  out.cost = std::numeric_limits<double>::infinity();
  std::vector<int> pick(choose);
  for (int i = 0; i < choose; ++i) pick[i] = i;
  std::vector<int> edges;
  edges.reserve(fixed.size() + choose);

  while (true) {
    ++out.visited;
    edges.assign(fixed.begin(), fixed.end());
    for (int i : pick) edges.push_back(pool[i]);

    UnionFind uf(n);
    for (int e : edges) uf.unite(network.edge(e).from, network.edge(e).to);
    if (uf.components() == 1) {
      ++out.connected;
      double c = 0.0;
      if (n > 1) {
        const Eigen::MatrixXd lb_hat = reduce(laplacian_matrix(network, edges), 0);
        Eigen::LLT<Eigen::MatrixXd> llt(lb_hat);
        c = llt.solve(lw_hat).trace();
      }
      if (out.best.empty() || strictly_better(c, out.cost)) {
        out.cost = c;
        out.best = edges;
      }
    }

    // Advance to the next combination in lexicographic order.
    int i = choose - 1;
    while (i >= 0 && pick[i] == p - choose + i) --i;
    if (i < 0) break;
    ++pick[i];
    for (int j = i + 1; j < choose; ++j) pick[j] = pick[j - 1] + 1;
  }

  if (out.best.empty())
    throw Error(ErrorKind::disconnected, "no connected edge subset of the requested size");
  std::sort(out.best.begin(), out.best.end());
  return out;
}

}  // namespace gridtopo::detail
