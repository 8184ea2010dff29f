#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <Eigen/QR>

#include "gridtopo/error.hpp"
#include "gridtopo/lyapunov.hpp"
#include "support/random_instances.hpp"

namespace gridtopo {
namespace {

using testing::random_network;

// Independent oracle: A'Q + QA = -C'C stacked with Q[1;0] = 0, solved as one
// overdetermined system by column-pivoted QR.
Eigen::MatrixXd oracle_gramian(const StateSpace& ss) {
  const int n = static_cast<int>(ss.a.rows());
  const int half = n / 2;
  const int rows = n * n + n;
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(rows, n * n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
  const Eigen::MatrixXd ctc = ss.c.transpose() * ss.c;
  // Row (i,j) of A'Q + QA: sum_l A(l,i) Q(l,j) + Q(i,l) A(l,j); vec is column-major.
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const int r = i + j * n;
      for (int l = 0; l < n; ++l) {
        k(r, l + j * n) += ss.a(l, i);
        k(r, i + l * n) += ss.a(l, j);
      }
      rhs(r) = -ctc(i, j);
    }
  for (int i = 0; i < n; ++i)
    for (int l = 0; l < half; ++l) k(n * n + i, i + l * n) = 1.0;
  const Eigen::VectorXd q = k.colPivHouseholderQr().solve(rhs);
  return Eigen::Map<const Eigen::MatrixXd>(q.data(), n, n);
}

StateSpace small_system(const Network& net, const CostSpec& spec) {
  return assemble_state_space(net, full_topology(net), build_cost(spec, net));
}

TEST(StateSpace, BlockLayout) {
  Network net({1.0, 2.0}, 0.5, {{0, 1, 3.0}});
  const auto ss = small_system(net, {});
  EXPECT_EQ(ss.a.rows(), 4);
  EXPECT_DOUBLE_EQ(ss.a(0, 2), 1.0);
  EXPECT_DOUBLE_EQ(ss.a(2, 0), -3.0);
  EXPECT_DOUBLE_EQ(ss.a(3, 0), 1.5);
  EXPECT_DOUBLE_EQ(ss.a(3, 3), -0.25);
  EXPECT_DOUBLE_EQ(ss.b(3, 1), 0.5);
  EXPECT_TRUE((ss.c.transpose() * ss.c).topLeftCorner(2, 2).isApprox(ss.cost.phase_laplacian));
}

TEST(PsdSqrt, SquaresBack) {
  Eigen::Matrix3d l;
  l << 2, -1, -1, -1, 2, -1, -1, -1, 2;
  const auto r = psd_sqrt(l);
  EXPECT_LT((r * r - l).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(psd_sqrt(-l), Error);
}

TEST(Gramian, ClosedFormValues) {
  // Two unit-inertia nodes, one unit line, consensus: Tr = 1, d = 1.
  Network two({1, 1}, 1, {{0, 1, 1.0}});
  auto ss = small_system(two, {});
  EXPECT_NEAR(h2_squared_via_gramian(ss, solve_observability_lyapunov(ss)), 0.5, 1e-10);

  // Unit triangle, consensus: Tr = 2.
  auto tri = testing::triangle_network();
  ss = small_system(tri, {});
  EXPECT_NEAR(h2_squared_via_gramian(ss, solve_observability_lyapunov(ss)), 1.0, 1e-10);

  // Frequency cost, M = (1, 2), d = 2: (1 + 1/2) / 4.
  Network freq({1, 2}, 2, {{0, 1, 1.0}});
  ss = small_system(freq, {.kind = CostKind::frequency});
  EXPECT_NEAR(h2_squared_via_gramian(ss, solve_observability_lyapunov(ss)), 0.375, 1e-10);
}

TEST(Gramian, MatchesStackedOracle) {
  for (std::uint64_t seed = 1; seed <= 6; ++seed) {
    const auto net = random_network(seed, {.nodes = 5, .extra_edges = 3});
    const auto ss = small_system(net, testing::random_custom_cost(seed, 5));
    const auto expected = oracle_gramian(ss);
    for (auto method : {LyapunovMethod::vectorized, LyapunovMethod::deflated_schur}) {
      const auto g = solve_observability_lyapunov(ss, method);
      EXPECT_LT((g.q - expected).cwiseAbs().maxCoeff(), 1e-9 * (1 + expected.norm()))
          << "seed " << seed;
    }
  }
}

TEST(Gramian, SingleNode) {
  Eigen::VectorXd m(1);
  m << 2.0;
  CostMatrices cost{Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Ones(1)};
  const auto ss = assemble_state_space(m, 1.0, Eigen::MatrixXd::Zero(1, 1), cost);
  const auto g = solve_observability_lyapunov(ss);
  EXPECT_NEAR(h2_squared_via_gramian(ss, g), 0.25, 1e-12);
  EXPECT_TRUE(verify_gramian_identities(ss, g).passed);
}

TEST(Gramian, IdentityReport) {
  const auto net = random_network(11, {.nodes = 6, .extra_edges = 4});
  const auto ss = small_system(net, testing::random_custom_cost(11, 6));
  const auto r = verify_gramian_identities(ss, solve_observability_lyapunov(ss));
  EXPECT_TRUE(r.passed);
  EXPECT_LT(r.phase_trace_residual, 1e-7);
  EXPECT_LT(r.h2_residual, 1e-7);
  EXPECT_LT(r.rigid_mode_residual, 1e-8);
  EXPECT_GT(r.min_eigenvalue, -1e-8);
}

TEST(Gramian, LargeSystemUsesSchurRoute) {
  const auto net = random_network(5, {.nodes = 20, .extra_edges = 15});
  const auto ss = small_system(net, {});
  const auto r = verify_gramian_identities(ss, solve_observability_lyapunov(ss));
  EXPECT_TRUE(r.passed);
}

TEST(Simulation, AgreesWithClosedForm) {
  const auto net = testing::triangle_network(2.0);
  const auto ss = small_system(net, {});
  SimulationOptions opts;
  opts.horizon = 2000;
  opts.seed = 7;
  const auto est = simulate_ambient(ss, opts);
  EXPECT_EQ(est.steps, 2'000'000);
  // Closed form: 3 pairs * (1/3) / 2.
  EXPECT_NEAR(est.mean, 0.5, 4 * est.standard_error + 0.02);
  EXPECT_EQ(simulate_ambient(ss, opts).mean, est.mean);
}

TEST(Simulation, StepGuard) {
  const auto ss = small_system(testing::triangle_network(100.0), {});
  SimulationOptions opts;
  opts.dt = 10 * max_simulation_step(ss);
  opts.horizon = 1;
  try {
    simulate_ambient(ss, opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_argument);
  }
}

}  // namespace
}  // namespace gridtopo
