#include <doctest.h>

#include <cmath>
#include <sstream>

#include "dsgm/graph.hpp"
#include "dsgm/kernels.hpp"
#include "dsgm/spectra.hpp"
#include "oracles.hpp"

using namespace dsgm;

namespace {

void check_simple(const Graph& g) {
  const Matrix A = dense_adjacency(g);
  REQUIRE((A - A.transpose()).cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(A.diagonal().cwiseAbs().maxCoeff() == 0.0);
  REQUIRE(A.sum() == 2.0 * static_cast<double>(g.edge_count()));
}

Graph cycle(Index n) {
  std::vector<Edge> e;
  for (Index i = 0; i < n; ++i) e.emplace_back(i, (i + 1) % n);
  return Graph::from_edges(n, e);
}

}  // namespace

TEST_SUITE("graphs") {

TEST_CASE("latent grid arithmetic") {
  auto u = latent_grid(1000, 0.002);
  CHECK(u.front() == doctest::Approx(-0.999));
  CHECK(u.back() == doctest::Approx(0.999));
  u = latent_grid(1000, 0.01);
  CHECK(u.front() == doctest::Approx(-4.995));
  CHECK(u.back() == doctest::Approx(4.995));
  u = latent_grid(2, 1.0);
  CHECK(u == std::vector<double>{-0.5, 0.5});
  CHECK_THROWS(latent_grid(1, 1.0));
  CHECK_THROWS(latent_grid(5, 0.0));
}

TEST_CASE("dsgm with degenerate kernels") {
  const Graph full = sample_dsgm(Kernel::constant(1.0), 12, 0.1, 3);
  CHECK(full.edge_count() == 66);
  const Graph none = sample_dsgm(Kernel::constant(0.0), 12, 0.1, 3);
  CHECK(none.edge_count() == 0);
  REQUIRE(full.latent().has_value());
  CHECK(full.latent()->front() == doctest::Approx(-0.55));
}

TEST_CASE("dsgm is deterministic given the seed") {
  const auto W = Kernel::synthetic_pq();
  CHECK(sample_dsgm(W, 300, 0.01, 5).edges() == sample_dsgm(W, 300, 0.01, 5).edges());
  CHECK(sample_dsgm(W, 300, 0.01, 5).edges() != sample_dsgm(W, 300, 0.01, 6).edges());
}

TEST_CASE("dsgm edge count matches the kernel expectation") {
  const auto W = Kernel::synthetic_pq(0.8, 0.2);
  const Index n = 1000;
  const double gamma = 0.002;
  const auto u = latent_grid(n, gamma);
  double mean = 0, var = 0;
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const double w = W(u[i], u[j]);
      mean += w;
      var += w * (1 - w);
    }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const double m = static_cast<double>(sample_dsgm(W, n, gamma, seed).edge_count());
    CHECK(std::abs(m - mean) < 3 * std::sqrt(var));
  }
}

TEST_CASE("sbm blocks") {
  const auto Y = balanced_communities(10, 2);
  const Graph g = sample_sbm(Y, Matrix::Identity(2, 2), 1);
  CHECK(g.edge_count() == 2 * 10);
  CHECK(degree_summary(g).components == 2);
  Matrix bad(2, 2);
  bad << 0.5, 0.1, 0.2, 0.5;
  CHECK_THROWS_AS(sample_sbm(Y, bad, 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_sbm(Y, Matrix::Constant(2, 2, 1.5), 1), std::invalid_argument);
  CHECK_THROWS_AS(sample_sbm(Y, Matrix::Constant(3, 3, 0.5), 1), std::invalid_argument);
}

TEST_CASE("gaussian mixture features") {
  const auto Y = balanced_communities(1000, 2);
  Vector mu(2);
  mu << 1, 1;
  const Matrix cov = 0.25 * Matrix::Identity(2, 2);
  const Matrix X = sample_gaussian_mixture_features(Y, {mu, -mu}, {cov, cov}, 4);
  for (int k = 0; k < 2; ++k) {
    Vector mean = Vector::Zero(2);
    const auto members = Y.members(k);
    for (Index i : members) mean += X.row(i).transpose();
    mean /= static_cast<double>(members.size());
    CHECK((mean - (k == 0 ? mu : Vector(-mu))).cwiseAbs().maxCoeff() < 0.1);
  }
  const Matrix Z = sample_gaussian_mixture_features(Y, {mu, -mu}, {Matrix::Zero(2, 2), Matrix::Zero(2, 2)}, 4);
  CHECK(Z.row(0).transpose() == mu);
  CHECK(Z.row(999).transpose() == -mu);
  // swapping the labels swaps the generating mean
  std::vector<int> flipped;
  for (int y : Y.labels()) flipped.push_back(1 - y);
  const Matrix F = sample_gaussian_mixture_features(CommunityAssignment(flipped, 2), {mu, -mu},
                                                    {Matrix::Zero(2, 2), Matrix::Zero(2, 2)}, 4);
  CHECK(F.row(0).transpose() == -mu);
  Matrix neg(2, 2);
  neg << 1, 0, 0, -1;
  CHECK_THROWS_AS(sample_gaussian_mixture_features(Y, {mu, -mu}, {neg, cov}, 4), std::invalid_argument);
}

TEST_CASE("normalized adjacency") {
  const Graph c6 = cycle(6);
  CHECK((Matrix(normalized_adjacency(c6)) - dense_adjacency(c6) / 2.0).cwiseAbs().maxCoeff() < 1e-15);
  const std::vector<Edge> e{{0, 1}};
  const Graph p2 = Graph::from_edges(2, e);
  CHECK(Matrix(normalized_adjacency(p2)) == dense_adjacency(p2));
  const Graph iso = Graph::from_edges(3, e);
  CHECK(Matrix(normalized_adjacency(iso)).row(2).cwiseAbs().sum() == 0.0);
}

TEST_CASE("invariant: normalized adjacency has spectral radius at most one") {
  Rng rng(8);
  for (int t = 0; t < 100; ++t) {
    const int n = 3 + static_cast<int>(rng.below(30));
    const Matrix A = oracle::random_adjacency(n, rng.uniform(), rng);
    std::vector<Edge> edges;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j)
        if (A(i, j) != 0) edges.emplace_back(i, j);
    const Matrix N = normalized_adjacency(Graph::from_edges(n, edges));
    REQUIRE((N - N.transpose()).cwiseAbs().maxCoeff() < 1e-15);
    const auto ev = oracle::jacobi(N).values;
    REQUIRE(std::max(std::abs(ev.front()), std::abs(ev.back())) <= 1.0 + 1e-12);
  }
}

TEST_CASE("edge dropping") {
  const auto W = Kernel::synthetic_pq();
  const Graph g = sample_dsgm(W, 400, 0.005, 2);
  CHECK(drop_edges(g, 0.0, 1).edges() == g.edges());
  CHECK(drop_edges(g, 1.0, 1).edge_count() == 0);
  const Graph d = drop_edges(g, 0.3, 1);
  CHECK(d.edge_count() == g.edge_count() - std::llround(0.3 * static_cast<double>(g.edge_count())));
  for (const auto& [i, j] : d.edges()) REQUIRE(g.has_edge(i, j));
  CHECK(d.latent() == g.latent());
  CHECK(drop_edges(g, 0.3, 1).edges() == d.edges());

  std::vector<Edge> many;
  for (Index i = 0; i < 1000; ++i) many.emplace_back(i, i + 1);
  CHECK(drop_edges(Graph::from_edges(1001, many), 0.2, 9).edge_count() == 800);
}

TEST_CASE("degree summary") {
  std::vector<Edge> k4;
  for (Index i = 0; i < 4; ++i)
    for (Index j = i + 1; j < 4; ++j) k4.emplace_back(i, j);
  const auto s = degree_summary(Graph::from_edges(4, k4));
  CHECK(s.mean == 3.0);
  CHECK(s.min == 3);
  CHECK(s.max == 3);
  CHECK(s.isolated == 0);
  CHECK(s.components == 1);
  const auto e = degree_summary(Graph(5));
  CHECK(e.mean == 0.0);
  CHECK(e.isolated == 5);
  CHECK(e.components == 5);
}

TEST_CASE("graph construction errors") {
  const std::vector<Edge> loop{{1, 1}};
  CHECK_THROWS_AS(Graph::from_edges(3, loop), std::invalid_argument);
  const std::vector<Edge> out{{0, 3}};
  CHECK_THROWS_AS(Graph::from_edges(3, out), std::invalid_argument);
  const std::vector<Edge> dup{{0, 1}, {1, 0}, {0, 1}};
  CHECK(Graph::from_edges(3, dup).edge_count() == 1);
}

TEST_CASE("edge list round trip and diagnostics") {
  const Graph g = sample_dsgm(Kernel::synthetic_pq(), 60, 0.05, 1);
  std::stringstream buf;
  write_edge_list(buf, g);
  const Graph back = read_edge_list(buf);
  CHECK(back.node_count() == g.node_count());
  CHECK(back.edges() == g.edges());

  std::istringstream messy("# comment\n0 1\n1 0\n2 2\n\n1 3\n");
  EdgeListStats stats;
  const Graph m = read_edge_list(messy, std::nullopt, &stats);
  CHECK(m.node_count() == 4);
  CHECK(m.edge_count() == 2);
  CHECK(stats.duplicates == 1);
  CHECK(stats.self_loops == 1);

  std::istringstream bad("0 1\n1 x\n");
  try {
    read_edge_list(bad);
    FAIL("expected a parse error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
  std::istringstream range("0 5\n");
  CHECK_THROWS(read_edge_list(range, Index{3}));
}

TEST_CASE("invariant: sampler outputs are simple graphs, N <= 50") {
  Rng rng(4);
  for (Index n = 2; n <= 50; ++n) {
    check_simple(sample_dsgm(Kernel::synthetic_pq(), n, 0.05, rng.next_u64()));
    Matrix B(2, 2);
    B << 0.7, 0.2, 0.2, 0.5;
    check_simple(sample_sbm(balanced_communities(n, 2), B, rng.next_u64()));
  }
}

TEST_CASE("community assignments") {
  const auto Y = balanced_communities(7, 2);
  CHECK(Y.labels() == std::vector<int>{0, 0, 0, 0, 1, 1, 1});
  const auto back = CommunityAssignment::from_one_hot(Y.one_hot());
  CHECK(back.labels() == Y.labels());
  Matrix bad = Y.one_hot();
  bad(3, 1) = 1.0;
  CHECK_THROWS_AS(CommunityAssignment::from_one_hot(bad), std::invalid_argument);
  const std::vector<double> u{-1.0, -0.1, 0.0, 2.0};
  CHECK(sign_communities(u).labels() == std::vector<int>{1, 1, 0, 0});
}

}
