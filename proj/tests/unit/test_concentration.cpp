#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "dsgm/concentration.hpp"
#include "dsgm/graph.hpp"
#include "dsgm/kernels.hpp"
#include "dsgm/rng.hpp"
#include "oracles.hpp"

using namespace dsgm;

namespace {

ConcentrationParams params(double aw, double c, double gamma, Index n, double eps = 0.0) {
  ConcentrationParams p;
  p.lipschitz = aw;
  p.truncation = c;
  p.gamma = gamma;
  p.nodes = n;
  p.epsilon = eps;
  return p;
}

double brute_delta(const std::vector<double>& a, const std::vector<double>& b, std::size_t k) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      if (i == k && j != k) best = std::min(best, std::abs(a[i] - b[j]));
      if (j == k && i != k) best = std::min(best, std::abs(b[j] - a[i]));
    }
  return best;
}

}  // namespace

TEST_SUITE("concentration") {

TEST_CASE("eigenvalue bound examples") {
  CHECK(eigenvalue_bound(params(1, 1, 0.01, 1'000'000)).linear == doctest::Approx(0.04));
  const auto b = eigenvalue_bound(params(1, 1e6, 0.002, 1000));
  CHECK(b.quadratic == doctest::Approx(0.008));
  CHECK(b.value() == doctest::Approx(0.008));

  auto p = params(2.0, 3.0, 1e-12, 1000, 0.05);
  p.beta = [](double, double n) { return std::sqrt(n); };
  CHECK(eigenvalue_bound(p).value() == doctest::Approx(std::sqrt(1000.0) / 1000 + 0.05).epsilon(1e-9));

  auto bad = params(1, 1, 0.01, 10);
  bad.chi = 1.0;
  CHECK_THROWS_AS(eigenvalue_bound(bad), std::invalid_argument);
  bad = params(-1, 1, 0.01, 10);
  CHECK_THROWS_AS(eigenvalue_bound(bad), std::invalid_argument);
}

TEST_CASE("eigenvector bound examples") {
  const auto p = params(1, 1, 0.01, 1000);
  CHECK(eigenvector_bound(p, std::numbers::pi / 2) == doctest::Approx(0.04));
  CHECK(eigenvector_bound(p, 2.0) == doctest::Approx(eigenvector_bound(p, 1.0) / 2));
  CHECK_THROWS_AS(eigenvector_bound(p, 0.0), std::domain_error);
  CHECK_THROWS_AS(eigenvector_bound(p, -1e-300), std::domain_error);
}

TEST_CASE("invariant: bounds are nondecreasing in gamma, A_w and eps") {
  Rng rng(8);
  for (int t = 0; t < 500; ++t) {
    const double aw = rng.uniform() * 3, c = rng.uniform() * 4, g = rng.uniform() * 0.05, e = rng.uniform();
    const Index n = 1 + static_cast<Index>(rng.below(5000));
    const double f = 1.0 + rng.uniform();
    const auto base = eigenvalue_bound(params(aw, c, g, n, e));
    for (const auto& q : {params(aw * f, c, g, n, e), params(aw, c, g * f, n, e), params(aw, c, g, n, e * f)}) {
      const auto b = eigenvalue_bound(q);
      REQUIRE(b.linear >= base.linear);
      REQUIRE(b.quadratic >= base.quadratic);
      REQUIRE(eigenvector_bound(q, 0.3) >= eigenvector_bound(params(aw, c, g, n, e), 0.3));
    }
  }
}

TEST_CASE("spectral separation") {
  const std::vector<double> kernel{1.0, 0.5}, induced{0.9, 0.4};
  CHECK(compute_delta_k(kernel, induced, 1) == doctest::Approx(0.4));
  const std::vector<double> same{3.0, 1.0, -0.5};
  CHECK(compute_delta_k(same, same, 2) == doctest::Approx(1.5));
  CHECK_THROWS(compute_delta_k(same, same, 4));
  CHECK_THROWS(compute_delta_k({}, same, 1));

  Rng rng(3);
  for (int t = 0; t < 1000; ++t) {
    const std::size_t n = 2 + rng.below(7);
    std::vector<double> a(n), b(n);
    for (auto& x : a) x = rng.normal();
    for (auto& x : b) x = rng.normal();
    const std::size_t k = rng.below(n);
    REQUIRE(compute_delta_k(a, b, static_cast<Index>(k + 1)) == brute_delta(a, b, k));
  }
}

TEST_CASE("induced kernel compared against itself has zero gaps") {
  const double gamma = 0.05;
  const Graph g = sample_dsgm(Kernel::synthetic_pq(), 40, gamma, 17);
  const auto induced = induced_kernel_spectrum(g, gamma);
  const auto ks = discretize_kernel_spectrum(induced_kernel(g, gamma), 1.0, 16, 6);
  auto p = params(1, 1, gamma, 40);
  for (Index k = 1; k <= 4; ++k) {
    const auto r = empirical_gap(ks, g, gamma, k, p);
    CHECK(r.eigenvalue_gap < 1e-9);
    CHECK(r.eigenfunction_gap < 1e-9);
    CHECK(r.lambda_induced == doctest::Approx(induced.eigenvalues(k - 1)));
  }
  CHECK_THROWS_AS(empirical_gap(ks, g, gamma, 7, p), std::invalid_argument);
}

TEST_CASE("invariant: sign alignment never increases the eigenfunction gap") {
  const auto ks = discretize_kernel_spectrum(Kernel::synthetic_pq(), 20.0, 800, 4);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const double gamma = 0.02 + 0.01 * static_cast<double>(seed % 3);
    const Graph g = sample_dsgm(Kernel::synthetic_pq(), 200, gamma, seed);
    auto induced = induced_kernel_spectrum(g, gamma);
    if (seed % 2) induced.step_heights *= -1.0;
    for (Index k = 1; k <= 2; ++k) {
      const auto r = empirical_gap(ks, induced, k, grid_params(Kernel::synthetic_pq(), 200, gamma, 51));
      REQUIRE(r.eigenfunction_gap <= r.eigenfunction_gap_unaligned + 1e-15);
      REQUIRE(r.eigenvalue_gap >= 0.0);
      REQUIRE(r.delta_k > 0.0);
    }
  }
}

TEST_CASE("bounds hold in self-consistency mode") {
  const double gamma = 0.01;
  const Index n = 300;
  const auto ks = discretize_kernel_spectrum(Kernel::synthetic_pq(), 30.0, 1200, 4);
  const Graph g = sample_dsgm(Kernel::synthetic_pq(), n, gamma, 5);
  auto p = grid_params(Kernel::synthetic_pq(), n, gamma, 101);
  for (Index k = 1; k <= 2; ++k) {
    const auto r0 = empirical_gap(ks, g, gamma, k, p);
    CHECK(r0.beta_residual >= 0.0);
    auto fitted = p;
    const double beta = r0.beta_residual * (1 + 1e-12) + 1e-15;
    fitted.beta = [beta](double, double) { return beta; };
    const auto r = empirical_gap(ks, g, gamma, k, fitted);
    CHECK(r.eigenvalue_gap <= r.bound_eigenvalue);
    CHECK(r.eigenfunction_gap <= r.bound_eigenvector);
  }
}

TEST_CASE("grid parameters") {
  const auto p = grid_params(Kernel::synthetic_pq(), 100, 0.01, 101);
  CHECK(p.truncation == doctest::Approx(0.495));
  CHECK(p.epsilon == doctest::Approx(2.0 / std::pow(1.495, 2)).epsilon(1e-6));
  CHECK(p.lipschitz > 0.0);
}

}
