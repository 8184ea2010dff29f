#include "gridtopo/network.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <string>
#include <utility>

#include "gridtopo/error.hpp"

namespace gridtopo {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::parse: return "parse";
    case ErrorKind::validation: return "validation";
    case ErrorKind::disconnected: return "disconnected";
    case ErrorKind::infeasible: return "infeasible";
    case ErrorKind::numerical: return "numerical";
  }
  return "unknown";
}

Network::Network(std::vector<double> inertia, double damping,
                 std::vector<Edge> edges)
    : inertia_(std::move(inertia)), damping_(damping), edges_(std::move(edges)) {
  const int n = node_count();
  if (n < 1) throw Error(ErrorKind::validation, "network has no nodes");
  for (int i = 0; i < n; ++i) {
    if (!(inertia_[i] > 0.0) || !std::isfinite(inertia_[i]))
      throw Error(ErrorKind::validation,
                  "node " + std::to_string(i) + ": inertia must be positive");
  }
  if (!(damping_ > 0.0) || !std::isfinite(damping_))
    throw Error(ErrorKind::validation, "damping must be positive");

  std::set<std::pair<int, int>> seen;
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    const Edge& edge = edges_[e];
    const std::string where = "edge " + std::to_string(e) + " (" +
                              std::to_string(edge.from) + "," +
                              std::to_string(edge.to) + ")";
    if (edge.from < 0 || edge.from >= n || edge.to < 0 || edge.to >= n)
      throw Error(ErrorKind::validation, where + ": node id out of range");
    if (edge.from == edge.to)
      throw Error(ErrorKind::validation, where + ": self-loop");
    if (!(edge.susceptance > 0.0) || !std::isfinite(edge.susceptance))
      throw Error(ErrorKind::validation, where + ": susceptance must be positive");
    if (!(edge.conductance >= 0.0) || !std::isfinite(edge.conductance))
      throw Error(ErrorKind::validation, where + ": conductance must be nonnegative");
    auto key = std::minmax(edge.from, edge.to);
    if (!seen.insert({key.first, key.second}).second)
      throw Error(ErrorKind::validation,
                  "duplicate edge between nodes " + std::to_string(key.first) +
                      " and " + std::to_string(key.second));
  }
}

const Edge& Network::edge(int index) const {
  if (index < 0 || index >= edge_count())
    throw Error(ErrorKind::invalid_argument,
                "edge index " + std::to_string(index) + " out of range");
  return edges_[index];
}

std::optional<int> Network::find_edge(int u, int v) const {
  for (int e = 0; e < edge_count(); ++e) {
    const Edge& edge = edges_[e];
    if ((edge.from == u && edge.to == v) || (edge.from == v && edge.to == u))
      return e;
  }
  return std::nullopt;
}

Topology::Topology(std::vector<int> edge_indices) : edges_(std::move(edge_indices)) {
  std::sort(edges_.begin(), edges_.end());
  if (std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw Error(ErrorKind::invalid_argument, "topology lists an edge twice");
}

bool Topology::contains(int edge_index) const {
  return std::binary_search(edges_.begin(), edges_.end(), edge_index);
}

void Topology::check_indices(const Network& network) const {
  for (int e : edges_) {
    if (e < 0 || e >= network.edge_count())
      throw Error(ErrorKind::invalid_argument,
                  "edge index " + std::to_string(e) + " out of range");
  }
}

Topology full_topology(const Network& network) {
  std::vector<int> all(network.edge_count());
  for (int e = 0; e < network.edge_count(); ++e) all[e] = e;
  return Topology(std::move(all));
}

}  // namespace gridtopo
