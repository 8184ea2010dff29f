#include "gridtopo/lyapunov.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "gridtopo/error.hpp"
#include "gridtopo/graph.hpp"

namespace gridtopo {

namespace {

constexpr double kResidualTolerance = 1e-8;
constexpr int kVectorizedMaxState = 24;

Eigen::MatrixXd kron(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  Eigen::MatrixXd out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i)
    for (Eigen::Index j = 0; j < x.cols(); ++j)
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
  return out;
}

Eigen::VectorXd rigid_mode(int n) {
  Eigen::VectorXd u = Eigen::VectorXd::Zero(2 * n);
  u.head(n).setOnes();
  return u;
}

Eigen::MatrixXd solve_vectorized(const StateSpace& ss, const Eigen::MatrixXd& ctc) {
  const Eigen::Index n = ss.a.rows();
  const Eigen::MatrixXd at = ss.a.transpose();
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  const Eigen::MatrixXd k = kron(eye, at) + kron(at, eye);
  const Eigen::VectorXd rhs = -Eigen::Map<const Eigen::VectorXd>(ctc.data(), n * n);
  const Eigen::VectorXd x = k.completeOrthogonalDecomposition().solve(rhs);
  Eigen::MatrixXd q = Eigen::Map<const Eigen::MatrixXd>(x.data(), n, n);
  q = 0.5 * (q + q.transpose());

  // Remove the w w' component so that u'Qu = 0, u = [1; 0].
  const int nodes = ss.node_count();
  const Eigen::VectorXd u = rigid_mode(nodes);
  Eigen::VectorXd w(2 * nodes);
  w.head(nodes).setConstant(ss.damping);
  w.tail(nodes) = ss.inertia;
  const double wu = w.dot(u);
  const double alpha = u.dot(q * u) / (wu * wu);
  q -= alpha * w * w.transpose();
  return q;
}

// Solves T Y + Y T^H = F for upper-triangular complex T.
Eigen::MatrixXcd solve_triangular_lyapunov(const Eigen::MatrixXcd& t,
                                           const Eigen::MatrixXcd& f) {
  const Eigen::Index m = t.rows();
  Eigen::MatrixXcd y = Eigen::MatrixXcd::Zero(m, m);
  for (Eigen::Index j = m - 1; j >= 0; --j) {
    Eigen::VectorXcd rhs = f.col(j);
    for (Eigen::Index k = j + 1; k < m; ++k) rhs -= std::conj(t(j, k)) * y.col(k);
    Eigen::MatrixXcd shifted = t;
    shifted.diagonal().array() += std::conj(t(j, j));
    y.col(j) = shifted.triangularView<Eigen::Upper>().solve(rhs);
  }
  return y;
}

Eigen::MatrixXd solve_deflated(const StateSpace& ss, const Eigen::MatrixXd& ctc) {
  const Eigen::Index n = ss.a.rows();
  const Eigen::VectorXd u = rigid_mode(ss.node_count()).normalized();
  const Eigen::MatrixXd h = Eigen::HouseholderQR<Eigen::MatrixXd>(u).householderQ();
  const Eigen::MatrixXd v = h.rightCols(n - 1);
  // A' maps everything into u-perp because A u = 0, so the equation closes
  // on that subspace: Ahat X + X Ahat' = -V'C'CV with Ahat = V'A'V.
  const Eigen::MatrixXd ahat = v.transpose() * ss.a.transpose() * v;
  const Eigen::MatrixXd rhs = -(v.transpose() * ctc * v);
  Eigen::ComplexSchur<Eigen::MatrixXd> schur(ahat);
  if (schur.info() != Eigen::Success)
    throw Error(ErrorKind::numerical, "Schur decomposition failed");
  const Eigen::MatrixXcd& us = schur.matrixU();
  const Eigen::MatrixXcd f = us.adjoint() * rhs.cast<std::complex<double>>() * us;
  const Eigen::MatrixXcd y = solve_triangular_lyapunov(schur.matrixT(), f);
  Eigen::MatrixXd x = (us * y * us.adjoint()).real();
  x = 0.5 * (x + x.transpose());
  return v * x * v.transpose();
}

}  // namespace

Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  if (m.size() == 0) return m;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  Eigen::VectorXd values = eig.eigenvalues();
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (values(i) < -1e-10 * scale)
      throw Error(ErrorKind::validation, "matrix is not positive semi-definite");
    values(i) = std::sqrt(std::max(values(i), 0.0));
  }
  const Eigen::MatrixXd& vecs = eig.eigenvectors();
  return vecs * values.asDiagonal() * vecs.transpose();
}

StateSpace assemble_state_space(const Eigen::VectorXd& inertia, double damping,
                                const Eigen::MatrixXd& susceptance_laplacian,
                                const CostMatrices& cost) {
  const Eigen::Index n = inertia.size();
  if (susceptance_laplacian.rows() != n || susceptance_laplacian.cols() != n ||
      cost.node_count() != n || cost.frequency_weights.size() != n)
    throw Error(ErrorKind::invalid_argument, "state-space dimensions disagree");
  if (!(damping > 0.0) || (inertia.array() <= 0.0).any())
    throw Error(ErrorKind::validation, "inertia and damping must be positive");

  const Eigen::VectorXd m_inv = inertia.cwiseInverse();
  StateSpace ss;
  ss.a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  ss.a.topRightCorner(n, n).setIdentity();
  ss.a.bottomLeftCorner(n, n) = -(m_inv.asDiagonal() * susceptance_laplacian);
  ss.a.bottomRightCorner(n, n) = (-damping * m_inv).asDiagonal();
  ss.b = Eigen::MatrixXd::Zero(2 * n, n);
  ss.b.bottomRows(n) = m_inv.asDiagonal();
  ss.c = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  ss.c.topLeftCorner(n, n) = psd_sqrt(cost.phase_laplacian);
  ss.c.bottomRightCorner(n, n) = cost.frequency_weights.cwiseSqrt().asDiagonal();
  ss.inertia = inertia;
  ss.damping = damping;
  ss.susceptance_laplacian = susceptance_laplacian;
  ss.cost = cost;
  return ss;
}

StateSpace assemble_state_space(const Network& network, const Topology& topology,
                                const CostMatrices& cost) {
  topology.check_indices(network);
  if (!is_connected(network, topology.edges()))
    throw Error(ErrorKind::disconnected, "topology does not connect all nodes");
  const Eigen::VectorXd inertia =
      Eigen::Map<const Eigen::VectorXd>(network.inertia().data(), network.node_count());
  return assemble_state_space(inertia, network.damping(),
                              laplacian_matrix(network, topology.edges()), cost);
}

Gramian solve_observability_lyapunov(const StateSpace& ss, LyapunovMethod method) {
  const Eigen::MatrixXd ctc = ss.c.transpose() * ss.c;
  if (method == LyapunovMethod::automatic)
    method = ss.a.rows() <= kVectorizedMaxState ? LyapunovMethod::vectorized
                                                 : LyapunovMethod::deflated_schur;
  Gramian g{method == LyapunovMethod::vectorized ? solve_vectorized(ss, ctc)
                                                 : solve_deflated(ss, ctc)};

  const double scale = std::max(1.0, ctc.cwiseAbs().maxCoeff());
  const double residual =
      (ss.a.transpose() * g.q + g.q * ss.a + ctc).cwiseAbs().maxCoeff();
  if (residual > kResidualTolerance * scale)
    throw Error(ErrorKind::numerical,
                "Lyapunov residual " + std::to_string(residual) + " exceeds tolerance");
  const double q_scale = std::max(1.0, g.q.cwiseAbs().maxCoeff());
  const double rigid = (g.q * rigid_mode(ss.node_count())).cwiseAbs().maxCoeff();
  if (rigid > kResidualTolerance * q_scale)
    throw Error(ErrorKind::numerical,
                "Gramian does not annihilate the rigid phase mode (" +
                    std::to_string(rigid) + ")");
  return g;
}

double h2_squared_via_gramian(const StateSpace& ss, const Gramian& g) {
  const double via_b = (ss.b.transpose() * g.q * ss.b).trace();
  const Eigen::VectorXd m_inv2 = ss.inertia.cwiseInverse().cwiseAbs2();
  const double via_q2 = (m_inv2.asDiagonal() * g.q2()).trace();
  if (std::abs(via_b - via_q2) > 1e-9 * std::max(1.0, std::abs(via_b)))
    throw Error(ErrorKind::numerical, "Tr(B'QB) and Tr(M^-2 Q2) disagree");
  return via_b;
}

GramianReport verify_gramian_identities(const StateSpace& ss, const Gramian& g) {
  const int n = ss.node_count();
  const Eigen::VectorXd m_inv = ss.inertia.cwiseInverse();
  auto relative = [](double lhs, double rhs) {
    return std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs));
  };

  GramianReport r;
  const LaplacianView lap(ss.susceptance_laplacian);
  r.phase_trace_lhs = 2.0 * (g.q0() * m_inv.asDiagonal()).trace();
  r.phase_trace_rhs = topology_cost(ss.cost, lap);
  r.phase_trace_residual = relative(r.phase_trace_lhs, r.phase_trace_rhs);

  const double s_term = ss.cost.frequency_weights.dot(m_inv);
  r.h2_lhs = (m_inv.cwiseAbs2().asDiagonal() * g.q2()).trace();
  r.h2_rhs = (r.phase_trace_rhs + s_term) / (2.0 * ss.damping);
  r.h2_residual = relative(r.h2_lhs, r.h2_rhs);

  const Eigen::MatrixXd ctc = ss.c.transpose() * ss.c;
  r.lyapunov_residual = (ss.a.transpose() * g.q + g.q * ss.a + ctc).cwiseAbs().maxCoeff();
  r.rigid_mode_residual = (g.q * rigid_mode(n)).cwiseAbs().maxCoeff();
  r.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                         g.q, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  r.passed = r.phase_trace_residual <= 1e-7 && r.h2_residual <= 1e-7 &&
             r.rigid_mode_residual <= 1e-8 * std::max(1.0, g.q.cwiseAbs().maxCoeff()) &&
             r.min_eigenvalue >= -1e-8 * std::max(1.0, g.q.cwiseAbs().maxCoeff());
  return r;
}

double max_simulation_step(const StateSpace& ss) {
  double lambda_max = 0.0;
  if (ss.susceptance_laplacian.size() > 0)
    lambda_max = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(
                     ss.susceptance_laplacian, Eigen::EigenvaluesOnly)
                     .eigenvalues()
                     .maxCoeff();
  return 0.1 * ss.inertia.minCoeff() / std::max(ss.damping, lambda_max);
}

SimulationEstimate simulate_ambient(const StateSpace& ss, const SimulationOptions& options) {
  if (!(options.dt > 0.0) || !(options.horizon > options.dt))
    throw Error(ErrorKind::invalid_argument, "horizon must exceed a positive dt");
  if (options.batches < 2 || options.recenter_every < 1 ||
      !(options.burn_in_fraction >= 0.0 && options.burn_in_fraction < 1.0))
    throw Error(ErrorKind::invalid_argument, "invalid simulation options");
  const double dt_limit = max_simulation_step(ss);
  if (options.dt > dt_limit)
    throw Error(ErrorKind::invalid_argument,
                "dt " + std::to_string(options.dt) + " exceeds stability guard " +
                    std::to_string(dt_limit));

  const Eigen::Index n = ss.node_count();
  const long long steps = static_cast<long long>(std::llround(options.horizon / options.dt));
  const long long burn = static_cast<long long>(options.burn_in_fraction * steps);
  const long long measured = steps - burn;
  const long long per_batch = measured / options.batches;
  if (per_batch < 1) throw Error(ErrorKind::invalid_argument, "horizon too short");

  // Precompute the discrete update x <- (I + A dt) x + sqrt(dt) B xi.
  const Eigen::MatrixXd step =
      Eigen::MatrixXd::Identity(2 * n, 2 * n) + options.dt * ss.a;
  const Eigen::MatrixXd noise_gain = std::sqrt(options.dt) * ss.b;
  const Eigen::MatrixXd ctc = ss.c.transpose() * ss.c;

  std::mt19937_64 rng(options.seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * n);
  Eigen::VectorXd next(2 * n);
  Eigen::VectorXd xi(n);
  std::vector<double> batch_sums(options.batches, 0.0);

  for (long long k = 0; k < steps; ++k) {
    for (Eigen::Index i = 0; i < n; ++i) xi(i) = normal(rng);
    next.noalias() = step * x;
    next.noalias() += noise_gain * xi;
    x.swap(next);
    if ((k + 1) % options.recenter_every == 0) {
      x.head(n).array() -= x.head(n).mean();
      if (!x.allFinite() || x.norm() > 1e150)
        throw Error(ErrorKind::numerical, "simulation diverged; reduce dt");
    }
    if (k >= burn) {
      const long long batch = (k - burn) / per_batch;
      if (batch < options.batches) batch_sums[batch] += x.dot(ctc * x);
    }
  }
  if (!x.allFinite()) throw Error(ErrorKind::numerical, "simulation diverged; reduce dt");

  double mean = 0.0;
  std::vector<double> batch_means(options.batches);
  for (int b = 0; b < options.batches; ++b) {
    batch_means[b] = batch_sums[b] / static_cast<double>(per_batch);
    mean += batch_means[b];
  }
  mean /= options.batches;
  double var = 0.0;
  for (double bm : batch_means) var += (bm - mean) * (bm - mean);
  var /= (options.batches - 1);
  return {mean, std::sqrt(var / options.batches), steps};
}

}  // namespace gridtopo
