#include <doctest.h>

#include <cmath>

#include "dsgm/graph.hpp"
#include "dsgm/kernels.hpp"
#include "oracles.hpp"

using namespace dsgm;

namespace {

std::vector<Kernel> sample_kernels() {
  Matrix cells(3, 3);
  cells << 0.1, 0.5, 0.2, 0.5, 0.9, 0.0, 0.2, 0.0, 0.4;
  return {Kernel::synthetic_pq(0.8, 0.2),
          Kernel::degree_corrected_sbk(0.6, 0.3, [](double u) { return std::exp(-u * u); }),
          Kernel::piecewise_constant(cells, {-1.0, 0.0, 0.5, 2.0}),
          Kernel::generic([](double u, double v) { return 0.5 + 0.25 * std::tanh(u * v); }, "tanh")};
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("synthetic kernel values") {
  const auto W = Kernel::synthetic_pq(0.8, 0.2);
  CHECK(W(0, 0) == doctest::Approx(0.8));
  CHECK(W(1, -1) == doctest::Approx(0.2 / 16));
  CHECK(W(1, 1) == doctest::Approx(0.8 / 16));
  CHECK(eval_kernel(W, -2, -3) == doctest::Approx(0.8 / 144));
}

TEST_CASE("invariant: kernels are symmetric and in [0,1]") {
  Rng rng(11);
  for (const auto& W : sample_kernels()) {
    for (int i = 0; i < 1000; ++i) {
      const double u = 6 * rng.uniform() - 3, v = 6 * rng.uniform() - 3;
      REQUIRE(W(u, v) == W(v, u));
      REQUIRE(W(u, v) >= 0.0);
      REQUIRE(W(u, v) <= 1.0);
    }
  }
}

TEST_CASE("kernel validation") {
  Matrix asym(2, 2);
  asym << 0.1, 0.2, 0.3, 0.4;
  CHECK_THROWS_AS(Kernel::piecewise_constant(asym, {0, 1, 2}), std::invalid_argument);
  Matrix ok = Matrix::Constant(2, 2, 0.5);
  CHECK_THROWS_AS(Kernel::piecewise_constant(ok, {0, 2, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Kernel::piecewise_constant(ok, {0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(Kernel::piecewise_constant(Matrix::Constant(2, 2, 1.5), {0, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(Kernel::synthetic_pq(1.2, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(Kernel::degree_corrected_sbk(0.5, 0.5, [](double) { return 2.0; }), std::invalid_argument);
}

TEST_CASE("closed-form SBK spectrum") {
  const auto s = sbk_closed_form_spectrum(0.8, 0.2, synthetic_degree);
  CHECK(s.lambda1 == doctest::Approx(1.0 / 3).epsilon(1e-8));
  CHECK(s.lambda2 == doctest::Approx(0.2).epsilon(1e-8));
  for (double u : {0.1, 0.7, 3.0}) {
    CHECK(s.phi2(u) == doctest::Approx(-s.phi2(-u)));
    CHECK(s.phi1(u) == doctest::Approx(s.phi1(-u)));
  }
  // unit L2 norm: phi1 = theta / sqrt(2/3)
  CHECK(s.phi1(0.0) == doctest::Approx(1.0 / std::sqrt(2.0 / 3.0)));
  const auto flat = sbk_closed_form_spectrum(0.5, 0.5, synthetic_degree);
  CHECK(std::abs(flat.lambda2) < 1e-12);
  CHECK_THROWS_AS(sbk_closed_form_spectrum(0.5, 0.2, [](double) { return 1.0; }), std::domain_error);
}

TEST_CASE("discretized spectrum of a constant kernel") {
  const auto s = discretize_kernel_spectrum(Kernel::constant(0.3), 2.0, 64, 3);
  CHECK(s.eigenvalues(0) == doctest::Approx(2 * 2.0 * 0.3).epsilon(1e-10));
  CHECK(std::abs(s.eigenvalues(1)) < 1e-10);
  CHECK_THROWS(discretize_kernel_spectrum(Kernel::constant(0.3), 2.0, 8, 3));
  CHECK_THROWS(discretize_kernel_spectrum(Kernel::constant(0.3), 2.0, 32, 40));
}

TEST_CASE("invariant: discretized eigenfunctions are orthonormal and ordered") {
  const auto s = discretize_kernel_spectrum(Kernel::synthetic_pq(), 8.0, 400, 6);
  const Matrix G = s.eigenfunctions.transpose() * s.weights.asDiagonal() * s.eigenfunctions;
  CHECK((G - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff() < 1e-6);
  for (Index i = 1; i < s.count(); ++i) CHECK(std::abs(s.eigenvalues(i - 1)) >= std::abs(s.eigenvalues(i)));
}

TEST_CASE("grid refinement converges to the closed form") {
  const Kernel W = Kernel::synthetic_pq(0.8, 0.2);
  const auto ref = sbk_closed_form_spectrum(0.8, 0.2, synthetic_degree);
  // truncation at c contributes (1 - (c+1)^-3) / 3 per side; compare against the truncated operator
  const double c = 10.0;
  const double a = (1.0 - std::pow(c + 1.0, -3)) / 3.0;
  double previous = INFINITY;
  for (Index m : {200, 400, 800}) {
    const auto s = discretize_kernel_spectrum(W, c, m, 2);
    const double err = std::abs(s.eigenvalues(0) - 1.0 * a);
    CHECK(err < previous);
    previous = err;
  }
  CHECK(previous < 1e-3);
  const auto coarse = discretize_kernel_spectrum(Kernel::synthetic_pq(0.5, 0.5), c, 500, 1);
  const auto fine = discretize_kernel_spectrum(Kernel::synthetic_pq(0.5, 0.5), c, 1000, 1);
  CHECK(oracle::rel_err(coarse.eigenvalues(0), fine.eigenvalues(0)) < 0.05);
  CHECK(ref.lambda1 > a * 0.999);
}

TEST_CASE("tail mass") {
  const Kernel W = Kernel::synthetic_pq(0.8, 0.2);
  double previous = INFINITY;
  for (double c : {1.0, 2.0, 4.0, 8.0}) {
    const double t = tail_mass(W, c);
    CHECK(t == doctest::Approx(2.0 * (0.8 + 0.2) / ((c + 1) * (c + 1))).epsilon(1e-5));
    CHECK(t <= previous);
    previous = t;
  }
  Matrix cells = Matrix::Constant(2, 2, 0.7);
  CHECK(tail_mass(Kernel::piecewise_constant(cells, {-1.0, 0.0, 1.0}), 1.0) == 0.0);
}

TEST_CASE("lipschitz estimates") {
  CHECK(lipschitz_estimate(Kernel::constant(0.4), 1.0, 64) == doctest::Approx(0.0));
  const double a = 0.1;
  const auto ramp = Kernel::generic([a](double u, double v) { return std::clamp(0.5 + a * (u + v), 0.0, 1.0); }, "ramp");
  CHECK(lipschitz_estimate(ramp, 1.0, 64) == doctest::Approx(a * std::sqrt(2.0)).epsilon(0.02));
  CHECK_THROWS(lipschitz_estimate(ramp, 1.0, 8));
}

TEST_CASE("induced kernel of a two-node graph") {
  const std::vector<Edge> e{{0, 1}};
  const Graph g = Graph::from_edges(2, e, latent_grid(2, 1.0), 1.0);
  const Kernel WN = induced_kernel(g, 1.0);
  CHECK(WN(0.0, 0.0) == 0.0);
  CHECK(WN(-0.4, 0.4) == 0.0);
  CHECK(WN(2.0, 0.0) == 0.0);
}

TEST_CASE("induced kernel reproduces adjacency entries at cell midpoints") {
  Rng rng(3);
  const Index n = 9;
  const double gamma = 0.3;
  const Matrix A = oracle::random_adjacency(n, 0.5, rng);
  std::vector<Edge> edges;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (A(i, j) != 0) edges.emplace_back(i, j);
  const auto u = latent_grid(n, gamma);
  const Graph g = Graph::from_edges(n, edges, u, gamma);
  const Kernel WN = induced_kernel(g, gamma);
  for (Index i = 0; i + 1 < n; ++i)
    for (Index j = 0; j + 1 < n; ++j) CHECK(WN(u[i] + gamma / 2, u[j] + gamma / 2) == A(i, j));
  CHECK_THROWS(induced_kernel(g, -1.0));
}

TEST_CASE("invariant: induced kernel spectrum is gamma times the adjacency spectrum, N <= 20") {
  Rng rng(17);
  for (Index n = 3; n <= 20; ++n) {
    const double gamma = 0.05 + rng.uniform();
    const Matrix A = oracle::random_adjacency(static_cast<int>(n), 0.4, rng);
    std::vector<Edge> edges;
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j)
        if (A(i, j) != 0) edges.emplace_back(i, j);
    const auto u = latent_grid(n, gamma);
    const Kernel WN = induced_kernel(Graph::from_edges(n, edges, u, gamma), gamma);
    // Brute force: midpoint rule with 3 points per cell is exact for a kernel constant on cells.
    const int per = 3;
    const int m = static_cast<int>(n - 1) * per;
    const double h = gamma / per;
    Matrix K(m, m);
    for (int s = 0; s < m; ++s)
      for (int t = 0; t < m; ++t) K(s, t) = WN(u[0] + (s + 0.5) * h, u[0] + (t + 0.5) * h) * h;
    auto brute = oracle::by_magnitude(oracle::jacobi(K).values);
    auto graph = oracle::by_magnitude(oracle::jacobi(A.topLeftCorner(n - 1, n - 1)).values);
    for (Index k = 0; k + 1 < n; ++k) REQUIRE(brute[k] == doctest::Approx(gamma * graph[k]).epsilon(1e-10));
    const auto s = discretize_kernel_spectrum(WN, 1.0, 16, n - 1);
    for (Index k = 0; k + 1 < n; ++k) REQUIRE(std::abs(s.eigenvalues(k) - gamma * graph[k]) < 1e-10);
  }
}

}
