#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "gridtopo/cost.hpp"
#include "gridtopo/network.hpp"

namespace gridtopo {

/// Default ceiling on the number of subsets a brute-force search may visit.
inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

struct TreeDesignResult {
  Topology tree;
  int root = -1;  // -1 when the tree did not come from a rooted construction
  double cost = 0.0;
  std::optional<double> gap_bound;
  std::optional<double> certified_ratio;
};

/// Sum over unordered pairs of w_ij times the tree path length, with each
/// edge having length 1/b. Throws if `tree` is not a spanning tree.
double tree_cost_by_paths(const Network& network, const Topology& tree,
                          const CostMatrices& cost);

/// Builds the shortest-path tree rooted at every node and keeps the one with
/// the smallest Tr(L_w L_b^+); the first minimum by node id wins.
TreeDesignResult design_tree(const Network& network, const CostMatrices& cost);

/// Exact optimum over all spanning trees of the candidate set.
TreeDesignResult brute_force_tree(const Network& network, const CostMatrices& cost,
                                  std::uint64_t cap = kDefaultEnumerationCap);

/// max_i sum_j w_ij divided by min_i of the floor(N/2) smallest w_ij, j != i.
/// Throws `infeasible` when the denominator vanishes.
double gap_bound(const Network& network, const CostMatrices& cost);

/// Bounds around the optimal tree, all in unordered-pair units.
struct GapCertificate {
  int median = -1;
  double design_cost = 0.0;
  double optimal_cost = 0.0;
  double ratio = 0.0;
  double gap_bound = 0.0;
  double upper_bound = 0.0;  // sum_i d(i,m) * max_i sum_j w_ij
  double lower_bound = 0.0;  // sum_i d(i,m) * min_i (N/2 smallest w_ij)
  bool within_gap_bound = false;
  bool below_upper_bound = false;
  bool above_lower_bound = false;

  bool passed() const { return within_gap_bound && below_upper_bound && above_lower_bound; }
};

/// Runs the brute-force oracle and compares `result` against it.
GapCertificate certify_ratio(const Network& network, const CostMatrices& cost,
                             const TreeDesignResult& result,
                             std::uint64_t cap = kDefaultEnumerationCap);

/// Binomial coefficient saturating at UINT64_MAX.
std::uint64_t binomial(int n, int k);

}  // namespace gridtopo
