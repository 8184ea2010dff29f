#pragma once

#include <optional>
#include <span>
#include <vector>

namespace gridtopo {

/// Candidate transmission line between two buses.
struct Edge {
  int from = 0;
  int to = 0;
  double susceptance = 0.0;  // b > 0, per-unit
  double conductance = 0.0;  // g >= 0, per-unit
  std::optional<bool> base;  // provenance tag used by the case generator

  bool operator==(const Edge&) const = default;
};

/// Design universe: buses with inertia, uniform damping and the full set of
/// candidate lines. Construction validates everything except connectivity,
/// which is checked by the operations that need it (and by the file loader).
class Network {
 public:
  Network(std::vector<double> inertia, double damping, std::vector<Edge> edges);

  int node_count() const { return static_cast<int>(inertia_.size()); }
  int edge_count() const { return static_cast<int>(edges_.size()); }
  std::span<const double> inertia() const { return inertia_; }
  double damping() const { return damping_; }
  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(int index) const;

  /// Index of the candidate joining u and v (either orientation).
  std::optional<int> find_edge(int u, int v) const;

  bool operator==(const Network&) const = default;

 private:
  std::vector<double> inertia_;
  double damping_;
  std::vector<Edge> edges_;
};

/// A selected subset of candidate edges, stored as sorted unique indices.
class Topology {
 public:
  Topology() = default;
  explicit Topology(std::vector<int> edge_indices);

  std::span<const int> edges() const { return edges_; }
  int size() const { return static_cast<int>(edges_.size()); }
  bool contains(int edge_index) const;

  /// Throws invalid_argument if any index is outside the candidate set.
  void check_indices(const Network& network) const;

  bool operator==(const Topology&) const = default;

 private:
  std::vector<int> edges_;
};

/// All candidate indices 0..|E|-1.
Topology full_topology(const Network& network);

}  // namespace gridtopo
