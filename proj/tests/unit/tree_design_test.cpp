#include <gtest/gtest.h>

#include <cstdint>
#include <functional>
#include <limits>
#include <vector>

#include "gridtopo/error.hpp"
#include "gridtopo/graph.hpp"
#include "gridtopo/tree_design.hpp"
#include "support/random_instances.hpp"

namespace gridtopo {
namespace {

using testing::path_network;
using testing::random_network;
using testing::triangle_network;

// Tree cost by walking every path explicitly.
double path_sum_oracle(const Network& net, const std::vector<int>& tree,
                       const CostMatrices& cost) {
  const int n = net.node_count();
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (int e : tree) {
    const auto& ed = net.edge(e);
    adj[ed.from].push_back({ed.to, 1.0 / ed.susceptance});
    adj[ed.to].push_back({ed.from, 1.0 / ed.susceptance});
  }
  double total = 0.0;
  for (int s = 0; s < n; ++s) {
    std::vector<double> dist(n, -1.0);
    std::function<void(int, double)> walk = [&](int u, double d) {
      dist[u] = d;
      for (auto [v, len] : adj[u])
        if (dist[v] < 0) walk(v, d + len);
    };
    walk(s, 0.0);
    for (int t = s + 1; t < n; ++t) total += cost.pair_weight(s, t) * dist[t];
  }
  return total;
}

// Optimum over every (N-1)-subset by bitmask.
double brute_oracle(const Network& net, const CostMatrices& cost) {
  const int m = net.edge_count();
  const int n = net.node_count();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
    if (__builtin_popcount(mask) != n - 1) continue;
    std::vector<int> sel;
    for (int e = 0; e < m; ++e)
      if (mask >> e & 1u) sel.push_back(e);
    if (!is_connected(net, sel)) continue;
    best = std::min(best, path_sum_oracle(net, sel, cost));
  }
  return best;
}

TEST(TreeCost, PathSumOnSmallTrees) {
  const auto p = path_network(3);
  EXPECT_NEAR(tree_cost_by_paths(p, Topology({0, 1}), build_cost({}, p)), 4.0, 1e-14);
  Network star({1, 1, 1, 1}, 1, {{0, 1, 1.0}, {0, 2, 2.0}, {0, 3, 4.0}});
  const auto c = build_cost({}, star);
  // Leaves pairwise: (1 + 1/2) + (1 + 1/4) + (1/2 + 1/4), hub: 1 + 1/2 + 1/4.
  EXPECT_NEAR(tree_cost_by_paths(star, full_topology(star), c), 5.25, 1e-14);
}

TEST(TreeCost, RejectsNonTrees) {
  const auto tri = triangle_network();
  const auto c = build_cost({}, tri);
  EXPECT_THROW(tree_cost_by_paths(tri, Topology({0, 1, 2}), c), Error);
  EXPECT_THROW(tree_cost_by_paths(path_network(4), Topology({0, 2}),
                                  build_cost({}, path_network(4))),
               Error);
}

TEST(DesignTree, TriangleRootZero) {
  const auto tri = triangle_network();
  const auto r = design_tree(tri, build_cost({}, tri));
  EXPECT_EQ(r.root, 0);
  EXPECT_EQ(r.tree, Topology({0, 2}));
  EXPECT_NEAR(r.cost, 4.0, 1e-13);
  ASSERT_TRUE(r.gap_bound.has_value());
  EXPECT_DOUBLE_EQ(*r.gap_bound, 2.0);
}

TEST(DesignTree, FrequencyCostIsInfeasible) {
  const auto tri = triangle_network();
  try {
    design_tree(tri, build_cost({.kind = CostKind::frequency}, tri));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::infeasible);
  }
}

TEST(BruteForceTree, MatchesBitmaskOracle) {
  for (std::uint64_t seed = 1; seed <= 8; ++seed) {
    const auto net = random_network(seed, {.nodes = 6, .extra_edges = 4});
    const auto cost = build_cost(testing::random_custom_cost(seed, 6), net);
    const auto r = brute_force_tree(net, cost);
    EXPECT_NEAR(r.cost, brute_oracle(net, cost), 1e-10 * r.cost) << "seed " << seed;
    EXPECT_EQ(r.certified_ratio, 1.0);
  }
}

TEST(BruteForceTree, CapIsEnforced) {
  const auto net = random_network(2, {.nodes = 6, .extra_edges = 6});
  try {
    brute_force_tree(net, build_cost({}, net), 10);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::infeasible);
  }
}

TEST(GapBound, ConsensusValues) {
  const auto p4 = path_network(4);
  EXPECT_DOUBLE_EQ(gap_bound(p4, build_cost({}, p4)), 1.5);
  const auto p5 = path_network(5);
  EXPECT_DOUBLE_EQ(gap_bound(p5, build_cost({}, p5)), 2.0);
}

TEST(GapBound, SkewedRanksExceedTwo) {
  const auto p4 = path_network(4);
  const auto c = build_cost({.kind = CostKind::ranked_consensus, .ranks = {100, 1, 1, 1}}, p4);
  EXPECT_DOUBLE_EQ(gap_bound(p4, c), 303.0 / 4.0);
}

TEST(GapBound, DegenerateDenominator) {
  const auto p4 = path_network(4);
  try {
    gap_bound(p4, build_cost({.kind = CostKind::frequency}, p4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::infeasible);
  }
}

TEST(Certificate, RandomConsensusInstances) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto net = random_network(seed, {.nodes = 6, .extra_edges = 5});
    const auto cost = build_cost({}, net);
    const auto cert = certify_ratio(net, cost, design_tree(net, cost));
    EXPECT_TRUE(cert.passed()) << "seed " << seed;
    EXPECT_GE(cert.ratio, 1.0 - 1e-12);
    EXPECT_LE(cert.ratio, 2.0);
  }
}

TEST(Binomial, Values) {
  EXPECT_EQ(binomial(18, 7), 31824u);
  EXPECT_EQ(binomial(5, 0), 1u);
  EXPECT_EQ(binomial(5, 7), 0u);
  EXPECT_EQ(binomial(200, 100), std::numeric_limits<std::uint64_t>::max());
}

}  // namespace
}  // namespace gridtopo
