#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "gridtopo/cost.hpp"
#include "gridtopo/network.hpp"
#include "gridtopo/tree_design.hpp"

namespace gridtopo {

/// Construction pipelines compared in experiment reports. Declaration order
/// is the row order within one k.
enum class Method {
  alg1_greedy,           // rooted tree + greedy augmentation
  alg1_brute_aug,        // rooted tree + optimal augmentation
  brute_tree_greedy,     // optimal tree + greedy augmentation
  brute_tree_brute_aug,  // optimal tree + optimal augmentation
  brute_global,          // optimal k-edge network
  mst_greedy,            // minimum spanning tree + greedy augmentation
};

std::string_view to_string(Method method);

struct ExperimentRow {
  std::string cost_kind;
  int k = 0;
  Method method = Method::alg1_greedy;
  bool feasible = true;
  double cost = 0.0;
  double h2_squared = 0.0;
  double relative_gap_percent = 0.0;  // vs the best feasible row at this k
  double relative_cost = 0.0;         // vs the report's reference network
};

struct ExperimentReport {
  std::optional<std::uint64_t> seed;
  int node_count = 0;
  int edge_count = 0;
  std::vector<ExperimentRow> rows;
  std::vector<std::string> notes;  // soft expectations that did not hold

  /// "# nodes=.. edges=.. seed=.." then one row per line; gaps with four
  /// decimals.
  std::string to_csv() const;
};

struct NamedCost {
  std::string name;
  CostMatrices cost;
};

struct ExperimentOptions {
  std::uint64_t cap = kDefaultEnumerationCap;
  std::optional<std::uint64_t> seed;
};

/// For each k: rooted and optimal trees, each augmented greedily and
/// optimally, plus the global optimum. Gaps and relative costs are measured
/// against the global optimum (or the best feasible row when the global
/// search exceeds the cap).
ExperimentReport run_gap_table(const Network& network, const NamedCost& cost,
                               std::span<const int> k_values,
                               const ExperimentOptions& options = {});

/// Cost-vs-k curves for rooted tree + greedy, rooted tree + optimal
/// augmentation and MST + greedy. Relative cost is normalized per cost
/// function by the rooted tree + optimal augmentation network at k_max.
ExperimentReport run_cardinality_sweep(const Network& network,
                                       std::span<const NamedCost> costs, int k_min,
                                       int k_max, const ExperimentOptions& options = {});

}  // namespace gridtopo
