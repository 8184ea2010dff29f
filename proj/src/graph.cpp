#include "gridtopo/graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

#include "gridtopo/error.hpp"

namespace gridtopo {

namespace {

constexpr double kTieTolerance = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Arc {
  int to;
  int edge;
};

std::vector<std::vector<Arc>> adjacency(const Network& network,
                                        std::span<const int> edges) {
  std::vector<std::vector<Arc>> adj(network.node_count());
  for (int e : edges) {
    const Edge& edge = network.edge(e);
    adj[edge.from].push_back({edge.to, e});
    adj[edge.to].push_back({edge.from, e});
  }
  return adj;
}

std::vector<int> all_edges(const Network& network) {
  std::vector<int> all(network.edge_count());
  std::iota(all.begin(), all.end(), 0);
  return all;
}

bool structurally_connected(const Eigen::MatrixXd& m) {
  const Eigen::Index n = m.rows();
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::queue<Eigen::Index> frontier;
  frontier.push(0);
  seen[0] = 1;
  Eigen::Index reached = 1;
  while (!frontier.empty()) {
    const Eigen::Index u = frontier.front();
    frontier.pop();
    for (Eigen::Index v = 0; v < n; ++v) {
      if (!seen[v] && v != u && m(u, v) != 0.0) {
        seen[v] = 1;
        ++reached;
        frontier.push(v);
      }
    }
  }
  return reached == n;
}

struct DijkstraResult {
  std::vector<double> dist;
  std::vector<int> pred_edge;  // -1 for root / unreachable
};

// O(N^2 + E) array Dijkstra; node selection picks the smallest distance and
// then the smallest id, so the output is platform independent.
DijkstraResult dijkstra(const Network& network, int root) {
  const int n = network.node_count();
  if (root < 0 || root >= n)
    throw Error(ErrorKind::invalid_argument,
                "root " + std::to_string(root) + " out of range");
  const auto adj = adjacency(network, all_edges(network));
  DijkstraResult r{std::vector<double>(n, kInf), std::vector<int>(n, -1)};
  std::vector<int> pred_node(n, -1);
  std::vector<char> done(n, 0);
  r.dist[root] = 0.0;
  for (int iter = 0; iter < n; ++iter) {
    int u = -1;
    for (int v = 0; v < n; ++v) {
      if (!done[v] && r.dist[v] < kInf && (u < 0 || r.dist[v] < r.dist[u])) u = v;
    }
    if (u < 0) break;
    done[u] = 1;
    for (const Arc& arc : adj[u]) {
      if (done[arc.to]) continue;
      const double candidate = r.dist[u] + 1.0 / network.edge(arc.edge).susceptance;
      const double current = r.dist[arc.to];
      const bool tie = current < kInf && std::abs(candidate - current) <= kTieTolerance;
      if (tie) {
        if (u < pred_node[arc.to]) {
          pred_node[arc.to] = u;
          r.pred_edge[arc.to] = arc.edge;
        }
      } else if (candidate < current) {
        r.dist[arc.to] = candidate;
        pred_node[arc.to] = u;
        r.pred_edge[arc.to] = arc.edge;
      }
    }
  }
  return r;
}

}  // namespace

Eigen::MatrixXd laplacian_matrix(const Network& network, std::span<const int> edges,
                                 EdgeWeight weight) {
  const int n = network.node_count();
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(n, n);
  for (int e : edges) {
    const Edge& edge = network.edge(e);
    const double w =
        weight == EdgeWeight::susceptance ? edge.susceptance : edge.conductance;
    if (weight == EdgeWeight::susceptance && !(w > 0.0))
      throw Error(ErrorKind::validation,
                  "edge " + std::to_string(e) + ": non-positive susceptance");
    if (!(w >= 0.0))
      throw Error(ErrorKind::validation,
                  "edge " + std::to_string(e) + ": negative weight");
    lap(edge.from, edge.to) -= w;
    lap(edge.to, edge.from) -= w;
    lap(edge.from, edge.from) += w;
    lap(edge.to, edge.to) += w;
  }
  return lap;
}

Eigen::MatrixXd laplacian_matrix(int node_count, std::span<const WeightedPair> pairs) {
  Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(node_count, node_count);
  for (const WeightedPair& p : pairs) {
    if (p.u < 0 || p.u >= node_count || p.v < 0 || p.v >= node_count || p.u == p.v)
      throw Error(ErrorKind::invalid_argument, "weighted pair has invalid endpoints");
    if (!(p.weight >= 0.0))
      throw Error(ErrorKind::validation, "negative pair weight");
    lap(p.u, p.v) -= p.weight;
    lap(p.v, p.u) -= p.weight;
    lap(p.u, p.u) += p.weight;
    lap(p.v, p.v) += p.weight;
  }
  return lap;
}

bool is_connected(const Network& network, std::span<const int> edges) {
  const int n = network.node_count();
  const auto adj = adjacency(network, edges);
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int reached = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (const Arc& arc : adj[u]) {
      if (!seen[arc.to]) {
        seen[arc.to] = 1;
        ++reached;
        stack.push_back(arc.to);
      }
    }
  }
  return reached == n;
}

Eigen::MatrixXd reduce(const Eigen::Ref<const Eigen::MatrixXd>& m, int r) {
  const Eigen::Index n = m.rows();
  if (r < 0 || r >= n)
    throw Error(ErrorKind::invalid_argument, "reference node out of range");
  Eigen::MatrixXd out(n - 1, n - 1);
  const Eigen::Index tail = n - 1 - r;
  out.topLeftCorner(r, r) = m.topLeftCorner(r, r);
  out.topRightCorner(r, tail) = m.topRightCorner(r, tail);
  out.bottomLeftCorner(tail, r) = m.bottomLeftCorner(tail, r);
  out.bottomRightCorner(tail, tail) = m.bottomRightCorner(tail, tail);
  return out;
}

LaplacianView::LaplacianView(Eigen::MatrixXd laplacian, int reference)
    : full_(std::move(laplacian)), reference_(reference), connected_(false) {
  if (full_.rows() != full_.cols() || full_.rows() < 1)
    throw Error(ErrorKind::invalid_argument, "Laplacian must be square and non-empty");
  const double scale = std::max(1.0, full_.cwiseAbs().maxCoeff());
  if ((full_ - full_.transpose()).cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw Error(ErrorKind::validation, "Laplacian is not symmetric");
  if (full_.rowwise().sum().cwiseAbs().maxCoeff() > 1e-9 * scale)
    throw Error(ErrorKind::validation, "Laplacian rows do not sum to zero");
  reduced_ = reduce(full_, reference_);
  connected_ = structurally_connected(full_);
  if (connected_ && reduced_.rows() > 0) {
    factor_.compute(reduced_);
    if (factor_.info() != Eigen::Success)
      throw Error(ErrorKind::numerical,
                  "reduced Laplacian of a connected graph failed to factor");
  }
}

LaplacianView LaplacianView::from_network(const Network& network,
                                          std::span<const int> edges,
                                          EdgeWeight weight, int reference) {
  return LaplacianView(laplacian_matrix(network, edges, weight), reference);
}

void LaplacianView::require_connected() const {
  if (!connected_)
    throw Error(ErrorKind::disconnected, "topology does not connect all nodes");
}

Eigen::VectorXd LaplacianView::reduced_solve(const Eigen::VectorXd& v) const {
  require_connected();
  return factor_.solve(v);
}

Eigen::MatrixXd LaplacianView::reduced_solve(const Eigen::MatrixXd& v) const {
  require_connected();
  return factor_.solve(v);
}

Eigen::MatrixXd LaplacianView::reduced_inverse() const {
  require_connected();
  return factor_.solve(Eigen::MatrixXd::Identity(reduced_.rows(), reduced_.cols()));
}

LaplacianView LaplacianView::with_reference(int reference) const {
  return LaplacianView(full_, reference);
}

Eigen::MatrixXd pseudo_inverse(const LaplacianView& lap) {
  lap.require_connected();
  const Eigen::Index n = lap.node_count();
  const Eigen::MatrixXd j = Eigen::MatrixXd::Constant(n, n, 1.0 / static_cast<double>(n));
  Eigen::LLT<Eigen::MatrixXd> llt(lap.full() + j);
  if (llt.info() != Eigen::Success)
    throw Error(ErrorKind::numerical, "rank-corrected Laplacian is not positive definite");
  Eigen::MatrixXd pinv = llt.solve(Eigen::MatrixXd::Identity(n, n)) - j;
  return 0.5 * (pinv + pinv.transpose());
}

double effective_inverse_susceptance(const LaplacianView& lap, int i, int j) {
  const int n = lap.node_count();
  if (i < 0 || i >= n || j < 0 || j >= n)
    throw Error(ErrorKind::invalid_argument, "node index out of range");
  lap.require_connected();
  if (i == j) return 0.0;
  const int r = lap.reference();
  Eigen::VectorXd a = Eigen::VectorXd::Zero(n - 1);
  auto slot = [r](int node) { return node < r ? node : node - 1; };
  if (i != r) a(slot(i)) += 1.0;
  if (j != r) a(slot(j)) -= 1.0;
  return a.dot(lap.reduced_solve(a));
}

Eigen::MatrixXd padded_reduced_inverse(const LaplacianView& lap) {
  const Eigen::Index n = lap.node_count();
  const Eigen::Index r = lap.reference();
  const Eigen::MatrixXd inv = lap.reduced_inverse();
  Eigen::MatrixXd z = Eigen::MatrixXd::Zero(n, n);
  const Eigen::Index tail = n - 1 - r;
  z.topLeftCorner(r, r) = inv.topLeftCorner(r, r);
  z.topRightCorner(r, tail) = inv.topRightCorner(r, tail);
  z.bottomLeftCorner(tail, r) = inv.bottomLeftCorner(tail, r);
  z.bottomRightCorner(tail, tail) = inv.bottomRightCorner(tail, tail);
  return z;
}

std::vector<double> shortest_distances(const Network& network, int root) {
  return dijkstra(network, root).dist;
}

Topology shortest_path_tree(const Network& network, int root) {
  const DijkstraResult r = dijkstra(network, root);
  std::vector<int> edges;
  for (int v = 0; v < network.node_count(); ++v) {
    if (v == root) continue;
    if (r.pred_edge[v] < 0)
      throw Error(ErrorKind::disconnected,
                  "candidate graph is disconnected: node " + std::to_string(v) +
                      " unreachable from " + std::to_string(root));
    edges.push_back(r.pred_edge[v]);
  }
  return Topology(std::move(edges));
}

int median_node(const Network& network) {
  int best = -1;
  double best_total = kInf;
  for (int m = 0; m < network.node_count(); ++m) {
    const auto dist = shortest_distances(network, m);
    const double total = std::accumulate(dist.begin(), dist.end(), 0.0);
    if (!std::isfinite(total))
      throw Error(ErrorKind::disconnected, "candidate graph is disconnected");
    if (best < 0 || total < best_total - kTieTolerance) {
      best = m;
      best_total = total;
    }
  }
  return best;
}

Topology minimum_spanning_tree(const Network& network) {
  std::vector<int> order = all_edges(network);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return 1.0 / network.edge(a).susceptance < 1.0 / network.edge(b).susceptance;
  });
  UnionFind uf(network.node_count());
  std::vector<int> chosen;
  for (int e : order) {
    if (uf.unite(network.edge(e).from, network.edge(e).to)) chosen.push_back(e);
  }
  if (uf.components() != 1)
    throw Error(ErrorKind::disconnected, "candidate graph is disconnected");
  return Topology(std::move(chosen));
}

UnionFind::UnionFind(int n) : parent_(n), rank_(n, 0), components_(n) {
  std::iota(parent_.begin(), parent_.end(), 0);
}

int UnionFind::find(int x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool UnionFind::unite(int a, int b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (rank_[a] < rank_[b]) std::swap(a, b);
  parent_[b] = a;
  if (rank_[a] == rank_[b]) ++rank_[a];
  --components_;
  return true;
}

}  // namespace gridtopo
