#pragma once

#include <cstdint>

#include <Eigen/Core>

#include "gridtopo/cost.hpp"
#include "gridtopo/network.hpp"

namespace gridtopo {

/// Swing dynamics in first-order form, state x = [theta; omega]:
///   A = [[0, I], [-M^-1 L_b, -M^-1 D]],  B = [0; M^-1],
///   C = blockdiag(L_w^{1/2}, S^{1/2}).
/// The physical parameters are kept alongside for the identity checks and
/// for the simulator's step-size guard.
struct StateSpace {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  Eigen::MatrixXd c;
  Eigen::VectorXd inertia;
  double damping = 0.0;
  Eigen::MatrixXd susceptance_laplacian;
  CostMatrices cost;

  int node_count() const { return static_cast<int>(inertia.size()); }
};

StateSpace assemble_state_space(const Network& network, const Topology& topology,
                                const CostMatrices& cost);

/// Lower-level form taking the Laplacian directly; also admits N = 1.
StateSpace assemble_state_space(const Eigen::VectorXd& inertia, double damping,
                                const Eigen::MatrixXd& susceptance_laplacian,
                                const CostMatrices& cost);

/// Symmetric PSD square root with eigenvalues above -1e-10 (relative) clamped
/// to zero; anything more negative is rejected.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m);

struct Gramian {
  Eigen::MatrixXd q;

  int node_count() const { return static_cast<int>(q.rows() / 2); }
  Eigen::MatrixXd q1() const { return q.topLeftCorner(node_count(), node_count()); }
  Eigen::MatrixXd q0() const { return q.topRightCorner(node_count(), node_count()); }
  Eigen::MatrixXd q2() const { return q.bottomRightCorner(node_count(), node_count()); }
};

enum class LyapunovMethod {
  automatic,       // vectorized for 2N <= 24, deflated Schur above
  vectorized,      // min-norm Kronecker solve plus rank-one nullspace fix
  deflated_schur,  // restrict to [1;0]-orthogonal subspace, Bartels-Stewart
};

/// Solves A'Q + QA = -C'C for the unique symmetric Q with Q [1;0] = 0.
/// The Lyapunov operator is singular along w w' with w = [d 1; M 1]; the
/// vectorized route removes that component after a minimum-norm solve.
/// Throws `numerical` if the residual or nullspace check exceeds 1e-8
/// (relative to max(1, |C'C|)).
Gramian solve_observability_lyapunov(const StateSpace& ss,
                                     LyapunovMethod method = LyapunovMethod::automatic);

/// Tr(B'QB). Cross-checks Tr(M^-2 Q_2) to 1e-9 and throws on mismatch.
double h2_squared_via_gramian(const StateSpace& ss, const Gramian& g);

struct GramianReport {
  double phase_trace_lhs = 0.0;   // 2 Tr(Q0 M^-1)
  double phase_trace_rhs = 0.0;   // Tr(L_w L_b^+)
  double phase_trace_residual = 0.0;
  double h2_lhs = 0.0;            // Tr(M^-2 Q2)
  double h2_rhs = 0.0;            // (Tr(L_w L_b^+) + Tr(S M^-1)) / 2d
  double h2_residual = 0.0;
  double lyapunov_residual = 0.0;
  double rigid_mode_residual = 0.0;  // |Q [1;0]|
  double min_eigenvalue = 0.0;
  bool passed = false;
};

/// Residuals are relative, |lhs - rhs| / max(1, |rhs|); passes at 1e-7.
GramianReport verify_gramian_identities(const StateSpace& ss, const Gramian& g);

struct SimulationOptions {
  double horizon = 1e4;
  double dt = 1e-3;
  std::uint64_t seed = 1;
  double burn_in_fraction = 0.05;
  int batches = 40;
  int recenter_every = 1000;
};

struct SimulationEstimate {
  double mean = 0.0;            // time average of y'y after burn-in
  double standard_error = 0.0;  // batch-means estimate
  long long steps = 0;
};

/// Euler-Maruyama integration of dx = Ax dt + B dW with unit-intensity
/// white noise on every node.
SimulationEstimate simulate_ambient(const StateSpace& ss, const SimulationOptions& options);

/// Largest stable step allowed by the simulator guard:
/// 0.1 min(M) / max(d, lambda_max(L_b)).
double max_simulation_step(const StateSpace& ss);

}  // namespace gridtopo
