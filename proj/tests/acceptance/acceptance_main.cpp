// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "gridtopo/cost.hpp"
#include "gridtopo/error.hpp"
#include "gridtopo/graph.hpp"
#include "gridtopo/io.hpp"
#include "gridtopo/lyapunov.hpp"
#include "gridtopo/mesh_design.hpp"
#include "gridtopo/tree_design.hpp"
#include "support/random_instances.hpp"

namespace {

using namespace gridtopo;
using Clock = std::chrono::steady_clock;

// Pinned tolerances.
constexpr double kClosedFormTol = 1e-6;
constexpr double kIdentityTol = 1e-7;
constexpr double kRigidModeTol = 1e-8;
constexpr double kReferenceSpreadTol = 1e-9;
constexpr double kTreeTol = 1e-9;
constexpr double kStochasticSigmas = 3.0;
constexpr double kStochasticRelTol = 0.05;
constexpr double kRatioLimit = 2.0;
constexpr double kRatioSlack = 1e-9;
constexpr double kGreedyRelTol = 1e-3;
constexpr double kTraceSlack = 1e-12;
constexpr double kDeltaTol = 1e-8;
constexpr double kDegenerateTol = 1e-12;
constexpr double kLyapunovBudgetSeconds = 30.0;
constexpr double kSimulationBudgetSeconds = 60.0;
constexpr double kBruteBudgetSeconds = 60.0;

int failures = 0;

void report(const char* name, bool passed, const std::string& detail) {
  std::printf("%s  %-28s %s\n", passed ? "PASS" : "FAIL", name, detail.c_str());
  std::fflush(stdout);
  if (!passed) ++failures;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class... Args>
std::string fmt(const char* f, Args... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

// Random connected network with N in [3,12], M in [0.5,2], d in {0.5,1,2},
// conductances on every line, and a cost cycling through the four kinds.
struct DynamicInstance {
  Network network;
  CostMatrices cost;
};

DynamicInstance dynamic_instance(std::uint64_t seed) {
  const int n = 3 + static_cast<int>(seed % 10);
  const double dampings[] = {0.5, 1.0, 2.0};
  const auto base = testing::random_network(
      seed, {.nodes = n, .extra_edges = static_cast<int>(seed % 6), .damping = dampings[seed % 3]});
  std::mt19937_64 rng(seed * 7919);
  std::uniform_real_distribution<double> gdist(0.05, 0.5), rdist(1.0, 3.0);
  std::vector<Edge> edges(base.edges().begin(), base.edges().end());
  for (auto& e : edges) e.conductance = gdist(rng);
  Network net(std::vector<double>(base.inertia().begin(), base.inertia().end()), base.damping(),
              edges);
  CostSpec spec;
  switch (seed % 4) {
    case 0: spec.kind = CostKind::frequency; break;
    case 1: spec.kind = CostKind::loss; break;
    case 2: spec.kind = CostKind::consensus; break;
    default:
      spec.kind = CostKind::ranked_consensus;
      for (int i = 0; i < n; ++i) spec.ranks.push_back(rdist(rng));
  }
  auto cost = build_cost(spec, net);
  return {std::move(net), std::move(cost)};
}

void lyapunov_criteria() {
  const auto t0 = Clock::now();
  constexpr int kInstances = 24;
  double worst_closed = 0, worst_phase = 0, worst_h2 = 0, worst_rigid = 0;
  bool ok = true;
  for (std::uint64_t seed = 1; seed <= kInstances; ++seed) {
    try {
      const auto inst = dynamic_instance(seed);
      const auto topo = full_topology(inst.network);
      const auto ss = assemble_state_space(inst.network, topo, inst.cost);
      const auto g = solve_observability_lyapunov(ss);
      const double gram = h2_squared_via_gramian(ss, g);
      const auto lap = LaplacianView::from_network(inst.network, topo.edges());
      const double closed = h2_squared_closed_form(inst.cost, inst.network, lap);
      worst_closed = std::max(worst_closed, std::abs(closed - gram) / gram);

      const auto r = verify_gramian_identities(ss, g);
      worst_phase = std::max(worst_phase, r.phase_trace_residual);
      worst_h2 = std::max(worst_h2, r.h2_residual);
      const Eigen::VectorXd ones = Eigen::VectorXd::Ones(ss.node_count());
      const double q0_col = (g.q0().transpose() * ones).cwiseAbs().maxCoeff();
      worst_rigid = std::max({worst_rigid, r.rigid_mode_residual, q0_col});
    } catch (const Error& e) {
      std::printf("  seed %llu: %s\n", static_cast<unsigned long long>(seed), e.what());
      ok = false;
    }
  }
  const double elapsed = seconds_since(t0);
  report("closed-form-vs-gramian",
         ok && worst_closed <= kClosedFormTol && elapsed < kLyapunovBudgetSeconds,
         fmt("%d instances, max rel err %.2e, %.2fs", kInstances, worst_closed, elapsed));
  report("gramian-identities",
         ok && worst_phase <= kIdentityTol && worst_h2 <= kIdentityTol &&
             worst_rigid <= kRigidModeTol,
         fmt("phase %.2e, h2 %.2e", worst_phase, worst_h2) + fmt(", rigid mode %.2e", worst_rigid));
}

void reference_invariance() {
  constexpr int kGraphs = 60;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= kGraphs; ++seed) {
    const auto net = testing::random_network(
        seed + 1000, {.nodes = 3 + static_cast<int>(seed % 12), .extra_edges = static_cast<int>(seed % 9)});
    const auto cost = build_cost(testing::random_custom_cost(seed, net.node_count()), net);
    const auto lap = LaplacianView::from_network(net, full_topology(net).edges());
    std::vector<double> values{(cost.phase_laplacian * pseudo_inverse(lap)).trace()};
    for (int r = 0; r < net.node_count(); ++r)
      values.push_back(topology_cost(cost, lap.with_reference(r)));
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    worst = std::max(worst, (*hi - *lo) / std::abs(values.front()));
  }
  report("reference-invariance", worst <= kReferenceSpreadTol,
         fmt("%d graphs, max rel spread %.2e", kGraphs, worst));
}

void tree_reformulation() {
  constexpr int kTrees = 60;
  double worst = 0;
  for (std::uint64_t seed = 1; seed <= kTrees; ++seed) {
    const auto net = testing::random_network(
        seed + 2000, {.nodes = 2 + static_cast<int>(seed % 14), .extra_edges = 0});
    const auto cost = build_cost(testing::random_custom_cost(seed, net.node_count()), net);
    const auto tree = full_topology(net);
    const double spectral = evaluate(net, cost, tree).cost;
    worst = std::max(worst, std::abs(tree_cost_by_paths(net, tree, cost) - spectral) / spectral);
  }
  report("tree-reformulation", worst <= kTreeTol,
         fmt("%d trees, max rel err %.2e", kTrees, worst));
}

void stochastic_check() {
  const auto file = load_network_file(GRIDTOPO_TEST_DATA_DIR "/fixture5.json");
  const auto cost = build_cost(cost_or_default(file), file.network);
  const auto topo = full_topology(file.network);
  const auto ss = assemble_state_space(file.network, topo, cost);
  const double closed = evaluate(file.network, cost, topo).h2_squared;
  SimulationOptions opts;
  opts.horizon = 1e4;
  opts.dt = 1e-3;
  opts.seed = 20240501;
  const auto t0 = Clock::now();
  const auto est = simulate_ambient(ss, opts);
  const double elapsed = seconds_since(t0);
  const double err = std::abs(est.mean - closed);
  report("stochastic-check",
         err <= kStochasticSigmas * est.standard_error && err <= kStochasticRelTol * closed &&
             elapsed < kSimulationBudgetSeconds,
         fmt("sim %.5f vs closed %.5f, ", est.mean, closed) +
             fmt("%.2f SE, %.2f%%, ", err / est.standard_error, 100 * err / closed) +
             fmt("%.1fs", elapsed));
}

std::vector<Network> certification_instances() {
  const auto base = load_network_file(GRIDTOPO_TEST_DATA_DIR "/case8_base.json");
  std::vector<Network> out;
  for (std::uint64_t seed = 1; seed <= 12; ++seed)
    out.push_back(generate_case(base, 10, seed).network);
  return out;
}

void tree_and_mesh_criteria() {
  const auto instances = certification_instances();
  double worst_ratio = 0, worst_slack = -1e300, worst_greedy = 0, worst_delta = 0;
  bool ratio_ok = true, greedy_ok = true, trace_ok = true;
  int runs = 0, greedy_runs = 0, greedy_misses = 0;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const Network& net = instances[i];
    const auto cost = build_cost({}, net);
    const auto designed = design_tree(net, cost);
    const auto cert = certify_ratio(net, cost, designed);
    worst_ratio = std::max(worst_ratio, cert.ratio);
    worst_slack = std::max(worst_slack, cert.ratio - cert.gap_bound);
    ratio_ok = ratio_ok && net.node_count() == 8 && net.edge_count() == 18 &&
               cert.ratio <= kRatioLimit + kRatioSlack &&
               cert.ratio <= cert.gap_bound + kRatioSlack;

    const int n = net.node_count();
    for (int k : {n, n + 1, n + 2}) {
      const auto greedy = greedy_augment(net, cost, designed.tree, k, {.verify_deltas = true});
      const auto optimal = brute_force_mesh(net, cost, k, designed.tree);
      const double gap = (greedy.cost - optimal.cost) / optimal.cost;
      worst_greedy = std::max(worst_greedy, gap);
      ++greedy_runs;
      if (gap > kGreedyRelTol) {
        greedy_ok = false;
        ++greedy_misses;
        std::printf("  instance %zu k=%d: greedy %.6f optimal %.6f\n", i + 1, k, greedy.cost,
                    optimal.cost);
      }
      double prev = designed.cost;
      for (const auto& step : greedy.trace) {
        trace_ok = trace_ok && step.cost <= prev * (1 + kTraceSlack);
        prev = step.cost;
      }
      worst_delta = std::max(worst_delta, *greedy.max_delta_discrepancy);
      ++runs;
    }
    // Full-length run for wider delta coverage.
    const auto full = greedy_augment(net, cost, designed.tree, net.edge_count(),
                                     {.verify_deltas = true});
    worst_delta = std::max(worst_delta, *full.max_delta_discrepancy);
    ++runs;
  }
  report("gap-certification", ratio_ok,
         fmt("%zu instances, max ratio %.4f, max ratio - bound %.4f", instances.size(),
             worst_ratio, worst_slack));
  report("greedy-quality", greedy_ok && trace_ok,
         fmt("%d/%d runs over 0.1%%, max greedy/optimal - 1 = %.2e, traces ", greedy_misses,
             greedy_runs, worst_greedy) +
             (trace_ok ? "non-increasing" : "INCREASING"));
  report("fast-update", worst_delta <= kDeltaTol,
         fmt("%d greedy runs, max rel delta err %.2e", runs, worst_delta));
}

void brute_force_scale() {
  const auto file = load_network_file(GRIDTOPO_TEST_DATA_DIR "/case8_18.json");
  const auto cost = build_cost({}, file.network);
  const int k = file.network.node_count() - 1;
  const auto t0 = Clock::now();
  bool ok = true;
  double c = 0;
  try {
    c = brute_force_mesh(file.network, cost, k).cost;
  } catch (const Error& e) {
    std::printf("  %s\n", e.what());
    ok = false;
  }
  const double elapsed = seconds_since(t0);
  const auto subsets = binomial(file.network.edge_count(), k);
  report("brute-force-scale", ok && subsets == 31824 && elapsed < kBruteBudgetSeconds,
         fmt("C(18,7) = %llu subsets, best %.6f, %.2fs",
             static_cast<unsigned long long>(subsets), c, elapsed));
}

void degenerate_handling() {
  const auto file = load_network_file(GRIDTOPO_TEST_DATA_DIR "/fixture5.json");
  const Network& net = file.network;
  const auto cost = build_cost({.kind = CostKind::frequency}, net);
  const double expected = frequency_term(cost, net) / (2 * net.damping());
  const int m = net.edge_count();
  int connected = 0;
  double worst = 0;
  for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
    std::vector<int> sel;
    for (int e = 0; e < m; ++e)
      if (mask >> e & 1u) sel.push_back(e);
    if (!is_connected(net, sel)) continue;
    ++connected;
    worst = std::max(worst, std::abs(evaluate(net, cost, Topology(sel)).h2_squared - expected));
  }
  bool clean_error = false;
  try {
    gap_bound(net, cost);
  } catch (const Error& e) {
    clean_error = e.kind() == ErrorKind::infeasible;
  }
  report("degenerate-frequency-cost", worst <= kDegenerateTol && clean_error && connected > 0,
         fmt("%d connected topologies, max dev %.1e, ", connected, worst) +
             (clean_error ? "gap bound rejected" : "gap bound NOT rejected"));
}

}  // namespace

int main() {
  const std::vector<std::function<void()>> checks{
      lyapunov_criteria, reference_invariance, tree_reformulation, stochastic_check,
      tree_and_mesh_criteria, brute_force_scale, degenerate_handling};
  for (const auto& check : checks) {
    try {
      check();
    } catch (const std::exception& e) {
      report("unexpected-exception", false, e.what());
    }
  }
  std::printf("%s\n", failures == 0 ? "all criteria passed" : "some criteria FAILED");
  return failures == 0 ? 0 : 1;
}
