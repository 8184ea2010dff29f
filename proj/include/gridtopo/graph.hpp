#pragma once

#include <optional>
#include <span>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "gridtopo/network.hpp"

namespace gridtopo {

enum class EdgeWeight { susceptance, conductance };

/// Weighted node pair for Laplacians not tied to the candidate set.
struct WeightedPair {
  int u = 0;
  int v = 0;
  double weight = 0.0;
};

/// Dense Laplacian of the selected candidate edges. Susceptance weights must
/// be strictly positive; conductance weights only nonnegative.
Eigen::MatrixXd laplacian_matrix(const Network& network,
                                 std::span<const int> edges,
                                 EdgeWeight weight = EdgeWeight::susceptance);

Eigen::MatrixXd laplacian_matrix(int node_count,
                                 std::span<const WeightedPair> pairs);

/// Breadth-first reachability over the selected edges.
bool is_connected(const Network& network, std::span<const int> edges);

/// Laplacian together with its reduced form (row/column `reference`
/// removed) and a Cholesky factorization of the reduced matrix. The
/// factorization only exists when the underlying graph is connected;
/// connectivity is decided structurally, from the off-diagonal pattern.
class LaplacianView {
 public:
  explicit LaplacianView(Eigen::MatrixXd laplacian, int reference = 0);

  static LaplacianView from_network(const Network& network,
                                    std::span<const int> edges,
                                    EdgeWeight weight = EdgeWeight::susceptance,
                                    int reference = 0);

  int node_count() const { return static_cast<int>(full_.rows()); }
  int reference() const { return reference_; }
  bool connected() const { return connected_; }
  const Eigen::MatrixXd& full() const { return full_; }
  const Eigen::MatrixXd& reduced() const { return reduced_; }

  /// Solves reduced * x = v. Throws `disconnected` when no factorization.
  Eigen::VectorXd reduced_solve(const Eigen::VectorXd& v) const;
  Eigen::MatrixXd reduced_solve(const Eigen::MatrixXd& v) const;
  Eigen::MatrixXd reduced_inverse() const;

  /// Same Laplacian, different reference node.
  LaplacianView with_reference(int reference) const;

  void require_connected() const;

 private:
  Eigen::MatrixXd full_;
  Eigen::MatrixXd reduced_;
  int reference_;
  bool connected_;
  Eigen::LLT<Eigen::MatrixXd> factor_;
};

/// Deletes row and column `reference`.
Eigen::MatrixXd reduce(const Eigen::Ref<const Eigen::MatrixXd>& m, int reference);

/// Moore-Penrose inverse via the rank correction (L + 11'/N)^-1 - 11'/N.
Eigen::MatrixXd pseudo_inverse(const LaplacianView& lap);

/// (e_i - e_j)' Lhat^-1 (e_i - e_j) with e_reference = 0; zero when i == j.
double effective_inverse_susceptance(const LaplacianView& lap, int i, int j);

/// Reduced inverse embedded back into N x N with zero row/column at the
/// reference node. Pairwise effective values read off as
/// Z(i,i) + Z(j,j) - 2 Z(i,j).
Eigen::MatrixXd padded_reduced_inverse(const LaplacianView& lap);

/// Shortest-path distances from `root` with edge length 1/b over the whole
/// candidate set. Unreachable nodes get +infinity.
std::vector<double> shortest_distances(const Network& network, int root);

/// Shortest-path tree over the candidate set, edge lengths 1/b. Ties within
/// 1e-12 prefer the predecessor with the smaller node id.
Topology shortest_path_tree(const Network& network, int root);

/// Node minimizing the total shortest-path distance to all others; smallest
/// id on ties.
int median_node(const Network& network);

/// Kruskal minimum spanning tree over edge lengths 1/b, ties by edge index.
Topology minimum_spanning_tree(const Network& network);

class UnionFind {
 public:
  explicit UnionFind(int n);

  int find(int x);
  bool unite(int a, int b);  // false if already joined
  int components() const { return components_; }

 private:
  std::vector<int> parent_;
  std::vector<int> rank_;
  int components_;
};

}  // namespace gridtopo
