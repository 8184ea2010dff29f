#include "gridtopo/cost.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "gridtopo/error.hpp"

namespace gridtopo {

std::string_view to_string(CostKind kind) {
  switch (kind) {
    case CostKind::frequency: return "frequency";
    case CostKind::loss: return "loss";
    case CostKind::consensus: return "consensus";
    case CostKind::ranked_consensus: return "ranked_consensus";
    case CostKind::custom: return "custom";
  }
  return "unknown";
}

CostKind parse_cost_kind(std::string_view name) {
  if (name == "frequency") return CostKind::frequency;
  if (name == "loss") return CostKind::loss;
  if (name == "consensus") return CostKind::consensus;
  if (name == "ranked_consensus" || name == "ranked") return CostKind::ranked_consensus;
  if (name == "custom") return CostKind::custom;
  throw Error(ErrorKind::invalid_argument,
              "unknown cost kind '" + std::string(name) + "'");
}

bool CostSpec::operator==(const CostSpec& other) const {
  if (kind != other.kind || ranks != other.ranks ||
      frequency_weights != other.frequency_weights || loss_edges != other.loss_edges)
    return false;
  if (weights.has_value() != other.weights.has_value()) return false;
  return !weights || (weights->rows() == other.weights->rows() &&
                      weights->cols() == other.weights->cols() &&
                      *weights == *other.weights);
}

bool CostMatrices::phase_weights_zero() const {
  return phase_laplacian.size() == 0 || phase_laplacian.cwiseAbs().maxCoeff() == 0.0;
}

namespace {

CostMatrices from_pair_weights(const Eigen::MatrixXd& w, Eigen::VectorXd s) {
  Eigen::MatrixXd lw = -w;
  lw.diagonal() = w.rowwise().sum() - w.diagonal();
  return {std::move(lw), std::move(s)};
}

}  // namespace

CostMatrices build_cost(const CostSpec& spec, const Network& network) {
  const int n = network.node_count();
  switch (spec.kind) {
    case CostKind::frequency:
      return {Eigen::MatrixXd::Zero(n, n), Eigen::VectorXd::Ones(n)};

    case CostKind::consensus:
      return from_pair_weights(Eigen::MatrixXd::Ones(n, n) - Eigen::MatrixXd::Identity(n, n),
                               Eigen::VectorXd::Zero(n));

    case CostKind::ranked_consensus: {
      if (static_cast<int>(spec.ranks.size()) != n)
        throw Error(ErrorKind::validation,
                    "ranked consensus needs " + std::to_string(n) + " ranks, got " +
                        std::to_string(spec.ranks.size()));
      Eigen::MatrixXd w(n, n);
      for (int i = 0; i < n; ++i) {
        if (!(spec.ranks[i] > 0.0))
          throw Error(ErrorKind::validation,
                      "rank of node " + std::to_string(i) + " must be positive");
      }
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) w(i, j) = i == j ? 0.0 : spec.ranks[i] + spec.ranks[j];
      return from_pair_weights(w, Eigen::VectorXd::Zero(n));
    }

    case CostKind::loss: {
      std::vector<int> edges = spec.loss_edges;
      if (edges.empty()) {
        edges.resize(network.edge_count());
        std::iota(edges.begin(), edges.end(), 0);
      }
      Eigen::MatrixXd lg = laplacian_matrix(network, edges, EdgeWeight::conductance);
      if (lg.cwiseAbs().maxCoeff() == 0.0)
        throw Error(ErrorKind::validation,
                    "loss cost needs nonzero conductances on its edge set");
      return {std::move(lg), Eigen::VectorXd::Zero(n)};
    }

    case CostKind::custom: {
      Eigen::MatrixXd w = spec.weights.value_or(Eigen::MatrixXd::Zero(n, n));
      if (w.rows() != n || w.cols() != n)
        throw Error(ErrorKind::validation, "custom weights must be N x N");
      for (int i = 0; i < n; ++i) {
        if (w(i, i) != 0.0)
          throw Error(ErrorKind::validation, "custom weights need a zero diagonal");
        for (int j = 0; j < n; ++j) {
          if (!(w(i, j) >= 0.0))
            throw Error(ErrorKind::validation, "custom weights must be nonnegative");
          if (w(i, j) != w(j, i))
            throw Error(ErrorKind::validation, "custom weights must be symmetric");
        }
      }
      Eigen::VectorXd s = Eigen::VectorXd::Zero(n);
      if (!spec.frequency_weights.empty()) {
        if (static_cast<int>(spec.frequency_weights.size()) != n)
          throw Error(ErrorKind::validation, "custom frequency weights must have N entries");
        for (int i = 0; i < n; ++i) {
          if (!(spec.frequency_weights[i] >= 0.0))
            throw Error(ErrorKind::validation, "frequency weights must be nonnegative");
          s(i) = spec.frequency_weights[i];
        }
      }
      return from_pair_weights(w, std::move(s));
    }
  }
  throw Error(ErrorKind::invalid_argument, "unhandled cost kind");
}

double topology_cost(const CostMatrices& cost, const LaplacianView& lap) {
  lap.require_connected();
  if (cost.node_count() != lap.node_count())
    throw Error(ErrorKind::invalid_argument, "cost and Laplacian sizes differ");
  if (lap.node_count() == 1) return 0.0;
  const Eigen::MatrixXd lw_hat = reduce(cost.phase_laplacian, lap.reference());
  return lap.reduced_solve(lw_hat).trace();
}

double pairwise_cost(const CostMatrices& cost, const LaplacianView& lap) {
  lap.require_connected();
  const int n = lap.node_count();
  const Eigen::MatrixXd z = padded_reduced_inverse(lap);
  double total = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double w = cost.pair_weight(i, j);
      if (w != 0.0) total += w * (z(i, i) + z(j, j) - 2.0 * z(i, j));
    }
  return total;
}

double frequency_term(const CostMatrices& cost, const Network& network) {
  double total = 0.0;
  for (int i = 0; i < network.node_count(); ++i)
    total += cost.frequency_weights(i) / network.inertia()[i];
  return total;
}

double h2_squared_closed_form(const CostMatrices& cost, const Network& network,
                              const LaplacianView& lap) {
  return (topology_cost(cost, lap) + frequency_term(cost, network)) /
         (2.0 * network.damping());
}

Evaluation evaluate(const Network& network, const CostMatrices& cost,
                    const Topology& topology) {
  topology.check_indices(network);
  if (!is_connected(network, topology.edges()))
    throw Error(ErrorKind::disconnected, "topology does not connect all nodes");
  const auto lap = LaplacianView::from_network(network, topology.edges());
  const double c = topology_cost(cost, lap);
  return {c, (c + frequency_term(cost, network)) / (2.0 * network.damping())};
}

}  // namespace gridtopo
