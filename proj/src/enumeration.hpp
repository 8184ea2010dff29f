#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gridtopo/cost.hpp"
#include "gridtopo/network.hpp"

namespace gridtopo::detail {

struct SubsetSearch {
  std::vector<int> best;  // sorted union of fixed and chosen edges
  double cost = 0.0;
  std::uint64_t visited = 0;
  std::uint64_t connected = 0;
};

/// Visits every `choose`-subset of `pool` in lexicographic order, adds
/// `fixed`, skips disconnected unions (union-find) and keeps the minimum
/// Tr(L_w L_b^+). Earlier subsets win ties. Throws `infeasible` if the
/// subset count exceeds `cap` or no connected union exists.
SubsetSearch best_connected_subset(const Network& network, const CostMatrices& cost,
                                   std::span<const int> fixed, std::span<const int> pool,
                                   int choose, std::uint64_t cap);

/// True when `candidate` beats `incumbent` by more than the relative tie
/// tolerance 1e-12.
inline bool strictly_better(double candidate, double incumbent) {
  return candidate < incumbent - 1e-12 * (incumbent < 0 ? -incumbent : incumbent);
}

}  // namespace gridtopo::detail
