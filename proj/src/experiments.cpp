#include "gridtopo/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <sstream>

#include "gridtopo/error.hpp"
#include "gridtopo/graph.hpp"
#include "gridtopo/mesh_design.hpp"

namespace gridtopo {

std::string_view to_string(Method method) {
  switch (method) {
    case Method::alg1_greedy: return "alg1+greedy";
    case Method::alg1_brute_aug: return "alg1+bruteAug";
    case Method::brute_tree_greedy: return "brute_tree+greedy";
    case Method::brute_tree_brute_aug: return "brute_tree+bruteAug";
    case Method::brute_global: return "bruteGlobal";
    case Method::mst_greedy: return "mst+greedy";
  }
  return "unknown";
}

namespace {

ExperimentRow make_row(const std::string& kind, int k, Method method,
                       const std::function<MeshDesignResult()>& run) {
  ExperimentRow row{kind, k, method};
  try {
    const MeshDesignResult r = run();
    row.cost = r.cost;
    row.h2_squared = r.h2_squared;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::infeasible) throw;
    row.feasible = false;
    row.cost = row.h2_squared = std::numeric_limits<double>::quiet_NaN();
  }
  return row;
}

// Fills relative_gap_percent against the best feasible row with the same
// (cost_kind, k).
void fill_gaps(std::vector<ExperimentRow>& rows) {
  std::map<std::pair<std::string, int>, double> best;
  for (const auto& r : rows) {
    if (!r.feasible) continue;
    auto key = std::make_pair(r.cost_kind, r.k);
    auto it = best.find(key);
    if (it == best.end() || r.cost < it->second) best[key] = r.cost;
  }
  for (auto& r : rows) {
    if (!r.feasible) {
      r.relative_gap_percent = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    const double b = best.at({r.cost_kind, r.k});
    r.relative_gap_percent = b > 0.0 ? std::max(0.0, 100.0 * (r.cost - b) / b) : 0.0;
  }
}

void sort_rows(std::vector<ExperimentRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
    return std::tie(a.cost_kind, a.k, a.method) < std::tie(b.cost_kind, b.k, b.method);
  });
}

std::string format_number(double x, const char* fmt) {
  if (std::isnan(x)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, fmt, x);
  return buf;
}

}  // namespace

std::string ExperimentReport::to_csv() const {
  std::ostringstream out;
  out << "# nodes=" << node_count << " edges=" << edge_count << " seed="
      << (seed ? std::to_string(*seed) : std::string("none")) << "\n";
  out << "cost_kind,k,method,status,cost,h2_squared,relative_gap_percent,relative_cost\n";
  for (const auto& r : rows) {
    out << r.cost_kind << ',' << r.k << ',' << to_string(r.method) << ','
        << (r.feasible ? "ok" : "infeasible") << ',' << format_number(r.cost, "%.10g") << ','
        << format_number(r.h2_squared, "%.10g") << ','
        << format_number(r.relative_gap_percent, "%.4f") << ','
        << format_number(r.relative_cost, "%.6f") << '\n';
  }
  return out.str();
}

ExperimentReport run_gap_table(const Network& network, const NamedCost& named,
                               std::span<const int> k_values,
                               const ExperimentOptions& options) {
  const CostMatrices& cost = named.cost;
  ExperimentReport report;
  report.seed = options.seed;
  report.node_count = network.node_count();
  report.edge_count = network.edge_count();

  const TreeDesignResult rooted = design_tree(network, cost);
  std::optional<TreeDesignResult> optimal;
  try {
    optimal = brute_force_tree(network, cost, options.cap);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::infeasible) throw;
  }
  auto require_optimal = [&]() -> const Topology& {
    if (!optimal) throw Error(ErrorKind::infeasible, "optimal tree unavailable");
    return optimal->tree;
  };

  for (int k : k_values) {
    const std::size_t first = report.rows.size();
    auto add = [&](Method m, const std::function<MeshDesignResult()>& run) {
      report.rows.push_back(make_row(named.name, k, m, run));
    };
    add(Method::alg1_greedy, [&] { return greedy_augment(network, cost, rooted.tree, k); });
    add(Method::alg1_brute_aug,
        [&] { return brute_force_mesh(network, cost, k, rooted.tree, options.cap); });
    add(Method::brute_tree_greedy,
        [&] { return greedy_augment(network, cost, require_optimal(), k); });
    add(Method::brute_tree_brute_aug,
        [&] { return brute_force_mesh(network, cost, k, require_optimal(), options.cap); });
    add(Method::brute_global,
        [&] { return brute_force_mesh(network, cost, k, std::nullopt, options.cap); });

    const ExperimentRow& global = report.rows.back();
    double reference = global.feasible ? global.cost : std::numeric_limits<double>::infinity();
    if (!global.feasible)
      for (std::size_t i = first; i < report.rows.size(); ++i)
        if (report.rows[i].feasible) reference = std::min(reference, report.rows[i].cost);
    for (std::size_t i = first; i < report.rows.size(); ++i)
      report.rows[i].relative_cost = report.rows[i].cost / reference;
  }
  fill_gaps(report.rows);
  sort_rows(report.rows);
  return report;
}

ExperimentReport run_cardinality_sweep(const Network& network,
                                       std::span<const NamedCost> costs, int k_min,
                                       int k_max, const ExperimentOptions& options) {
  if (k_min > k_max) throw Error(ErrorKind::invalid_argument, "k_min exceeds k_max");
  ExperimentReport report;
  report.seed = options.seed;
  report.node_count = network.node_count();
  report.edge_count = network.edge_count();
  const Topology mst = minimum_spanning_tree(network);

  for (const NamedCost& named : costs) {
    const TreeDesignResult rooted = design_tree(network, named.cost);
    const std::size_t first = report.rows.size();
    for (int k = k_min; k <= k_max; ++k) {
      report.rows.push_back(make_row(named.name, k, Method::alg1_greedy, [&] {
        return greedy_augment(network, named.cost, rooted.tree, k);
      }));
      report.rows.push_back(make_row(named.name, k, Method::alg1_brute_aug, [&] {
        return brute_force_mesh(network, named.cost, k, rooted.tree, options.cap);
      }));
      report.rows.push_back(make_row(named.name, k, Method::mst_greedy, [&] {
        return greedy_augment(network, named.cost, mst, k);
      }));
    }

    // Normalize by the optimally augmented rooted tree at k_max; fall back to
    // the best feasible k_max row when that search was capped.
    double reference = std::numeric_limits<double>::infinity();
    for (std::size_t i = first; i < report.rows.size(); ++i) {
      const auto& r = report.rows[i];
      if (r.k == k_max && r.method == Method::alg1_brute_aug && r.feasible) reference = r.cost;
    }
    if (!std::isfinite(reference)) {
      for (std::size_t i = first; i < report.rows.size(); ++i)
        if (report.rows[i].k == k_max && report.rows[i].feasible)
          reference = std::min(reference, report.rows[i].cost);
      report.notes.push_back(named.name + ": optimal augmentation at k_max infeasible; "
                                          "normalized by best feasible k_max network");
    }
    for (std::size_t i = first; i < report.rows.size(); ++i) {
      report.rows[i].relative_cost = report.rows[i].cost / reference;
    }
    for (std::size_t i = first; i < report.rows.size(); i += 3) {
      const auto& greedy = report.rows[i];
      const auto& mst_row = report.rows[i + 2];
      if (mst_row.cost < greedy.cost)
        report.notes.push_back(named.name + ": at k=" + std::to_string(greedy.k) +
                               " mst+greedy beats alg1+greedy");
    }
  }
  fill_gaps(report.rows);
  sort_rows(report.rows);
  return report;
}

}  // namespace gridtopo
