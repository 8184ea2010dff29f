#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "gridtopo/graph.hpp"
#include "gridtopo/network.hpp"

namespace gridtopo {

enum class CostKind { frequency, loss, consensus, ranked_consensus, custom };

std::string_view to_string(CostKind kind);
CostKind parse_cost_kind(std::string_view name);

/// Objective description. Only the fields relevant to `kind` are used:
/// `ranks` for ranked consensus, `weights`/`frequency_weights` for custom,
/// `loss_edges` for loss (empty means every candidate edge).
struct CostSpec {
  CostKind kind = CostKind::consensus;
  std::vector<double> ranks;
  std::optional<Eigen::MatrixXd> weights;  // symmetric, zero diagonal
  std::vector<double> frequency_weights;   // s_i
  std::vector<int> loss_edges;

  bool operator==(const CostSpec& other) const;
};

/// The pair (L_w, S): phase-difference weighting Laplacian and diagonal
/// frequency weights.
struct CostMatrices {
  Eigen::MatrixXd phase_laplacian;     // L_w
  Eigen::VectorXd frequency_weights;   // diag(S)

  int node_count() const { return static_cast<int>(phase_laplacian.rows()); }
  double pair_weight(int i, int j) const { return -phase_laplacian(i, j); }
  bool phase_weights_zero() const;
};

CostMatrices build_cost(const CostSpec& spec, const Network& network);

/// Tr(L_w L_b^+), evaluated as Tr(Lhat_w Lhat_b^-1) at the view's reference.
double topology_cost(const CostMatrices& cost, const LaplacianView& lap);

/// Sum over unordered pairs of w_ij times the effective inverse susceptance.
double pairwise_cost(const CostMatrices& cost, const LaplacianView& lap);

/// Sum_i s_i / M_i.
double frequency_term(const CostMatrices& cost, const Network& network);

/// Squared H2 norm (Tr(L_w L_b^+) + Tr(S M^-1)) / 2d under uniform damping.
double h2_squared_closed_form(const CostMatrices& cost, const Network& network,
                              const LaplacianView& lap);

/// Cost and squared H2 norm of a topology, checking connectivity by traversal.
struct Evaluation {
  double cost = 0.0;
  double h2_squared = 0.0;
};

Evaluation evaluate(const Network& network, const CostMatrices& cost,
                    const Topology& topology);

}  // namespace gridtopo
