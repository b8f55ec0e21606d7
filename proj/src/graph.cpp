#include "dsgm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "dsgm/kernels.hpp"
#include "dsgm/rng.hpp"

namespace dsgm {

Graph::Graph(Index n) : neighbors_(static_cast<std::size_t>(n)) {
  if (n < 0) throw std::invalid_argument("Graph: negative node count");
}

Graph Graph::from_edges(Index n, std::span<const Edge> edges,
                        std::optional<std::vector<double>> latent, std::optional<double> gamma) {
  Graph g(n);
  for (const auto& [i, j] : edges) {
    if (i < 0 || j < 0 || i >= n || j >= n) {
      throw std::invalid_argument("edge (" + std::to_string(i) + ", " + std::to_string(j) +
                                  ") outside node range [0, " + std::to_string(n) + ")");
    }
    if (i == j) throw std::invalid_argument("self-loop at node " + std::to_string(i));
    g.neighbors_[i].push_back(j);
    g.neighbors_[j].push_back(i);
  }
  Index half_edges = 0;
  for (auto& list : g.neighbors_) {
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    half_edges += static_cast<Index>(list.size());
  }
  g.edge_count_ = half_edges / 2;
  if (latent) {
    if (static_cast<Index>(latent->size()) != n) {
      throw std::invalid_argument("latent coordinates must have one entry per node");
    }
    for (Index i = 1; i < n; ++i) {
      if (!((*latent)[i] > (*latent)[i - 1])) {
        throw std::invalid_argument("latent coordinates must be strictly increasing");
      }
    }
  }
  g.latent_ = std::move(latent);
  g.gamma_ = gamma;
  return g;
}

bool Graph::has_edge(Index i, Index j) const {
  const auto& list = neighbors_[i];
  return std::binary_search(list.begin(), list.end(), j);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(static_cast<std::size_t>(edge_count_));
  for (Index i = 0; i < node_count(); ++i) {
    for (Index j : neighbors_[i]) {
      if (i < j) out.emplace_back(i, j);
    }
  }
  return out;
}

CommunityAssignment::CommunityAssignment(std::vector<int> labels, int classes)
    : labels_(std::move(labels)), classes_(classes) {
  if (classes < 1) throw std::invalid_argument("community count must be positive");
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (labels_[i] < 0 || labels_[i] >= classes) {
      throw std::invalid_argument("label of node " + std::to_string(i) + " outside [0, " +
                                  std::to_string(classes) + ")");
    }
  }
}

CommunityAssignment CommunityAssignment::from_one_hot(const Matrix& Y) {
  std::vector<int> labels(static_cast<std::size_t>(Y.rows()));
  for (Index i = 0; i < Y.rows(); ++i) {
    int hot = -1;
    for (Index k = 0; k < Y.cols(); ++k) {
      if (Y(i, k) == 1.0 && hot < 0) {
        hot = static_cast<int>(k);
      } else if (Y(i, k) != 0.0) {
        hot = -2;
        break;
      }
    }
    if (hot < 0) throw std::invalid_argument("row " + std::to_string(i) + " is not one-hot");
    labels[i] = hot;
  }
  return CommunityAssignment(std::move(labels), static_cast<int>(Y.cols()));
}

Matrix CommunityAssignment::one_hot() const {
  Matrix Y = Matrix::Zero(size(), classes_);
  for (Index i = 0; i < size(); ++i) Y(i, labels_[i]) = 1.0;
  return Y;
}

std::vector<Index> CommunityAssignment::members(int k) const {
  std::vector<Index> out;
  for (Index i = 0; i < size(); ++i) {
    if (labels_[i] == k) out.push_back(i);
  }
  return out;
}

CommunityAssignment balanced_communities(Index n, int classes) {
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) labels[i] = static_cast<int>(i * classes / n);
  return CommunityAssignment(std::move(labels), classes);
}

CommunityAssignment sign_communities(std::span<const double> latent) {
  std::vector<int> labels(latent.size());
  for (std::size_t i = 0; i < latent.size(); ++i) labels[i] = latent[i] >= 0.0 ? 0 : 1;
  return CommunityAssignment(std::move(labels), 2);
}

std::vector<double> latent_grid(Index n, double gamma) {
  if (n < 2) throw std::invalid_argument("latent_grid: need at least two nodes");
  if (!(gamma > 0.0)) throw std::invalid_argument("latent_grid: gamma must be positive");
  std::vector<double> u(static_cast<std::size_t>(n));
  const double first = -static_cast<double>(n / 2) * gamma + 0.5 * gamma;
  for (Index i = 0; i < n; ++i) u[i] = first + static_cast<double>(i) * gamma;
  return u;
}

Graph sample_dsgm(const Kernel& kernel, Index n, double gamma, std::uint64_t seed) {
  auto u = latent_grid(n, gamma);
  Rng rng(seed);
  std::vector<Edge> edges;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (rng.bernoulli(kernel(u[i], u[j]))) edges.emplace_back(i, j);
    }
  }
  return Graph::from_edges(n, edges, std::move(u), gamma);
}

Graph sample_sbm(const CommunityAssignment& Y, const Matrix& B, std::uint64_t seed) {
  if (B.rows() != B.cols()) throw std::invalid_argument("sample_sbm: B must be square");
  if (B.rows() != Y.classes()) throw std::invalid_argument("sample_sbm: B does not match class count");
  if ((B - B.transpose()).cwiseAbs().maxCoeff() > 0.0) {
    throw std::invalid_argument("sample_sbm: B must be symmetric");
  }
  if (B.minCoeff() < 0.0 || B.maxCoeff() > 1.0) {
    throw std::invalid_argument("sample_sbm: B entries must lie in [0, 1]");
  }
  const Index n = Y.size();
  Rng rng(seed);
  std::vector<Edge> edges;
  for (Index i = 0; i < n; ++i) {
    for (Index j = i + 1; j < n; ++j) {
      if (rng.bernoulli(B(Y.label(i), Y.label(j)))) edges.emplace_back(i, j);
    }
  }
  return Graph::from_edges(n, edges);
}

Matrix sample_gaussian_mixture_features(const CommunityAssignment& Y,
                                        const std::vector<Vector>& means,
                                        const std::vector<Matrix>& covariances,
                                        std::uint64_t seed) {
  const auto classes = static_cast<std::size_t>(Y.classes());
  if (means.size() != classes || covariances.size() != classes) {
    throw std::invalid_argument("gaussian mixture: need one mean and covariance per community");
  }
  const Index d = means.front().size();
  std::vector<Matrix> factors;
  for (std::size_t k = 0; k < classes; ++k) {
    const Matrix& cov = covariances[k];
    if (means[k].size() != d || cov.rows() != d || cov.cols() != d) {
      throw std::invalid_argument("gaussian mixture: inconsistent dimensions for community " +
                                  std::to_string(k));
    }
    if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, cov.cwiseAbs().maxCoeff())) {
      throw std::invalid_argument("gaussian mixture: covariance " + std::to_string(k) +
                                  " is not symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(cov);
    const Vector values = solver.eigenvalues();
    if (values.size() > 0 && values.minCoeff() < -1e-12 * std::max(1.0, values.cwiseAbs().maxCoeff())) {
      throw std::invalid_argument("gaussian mixture: covariance " + std::to_string(k) +
                                  " is not positive semidefinite");
    }
    factors.push_back(solver.eigenvectors() * values.cwiseMax(0.0).cwiseSqrt().asDiagonal());
  }
  Rng rng(seed);
  Matrix X(Y.size(), d);
  Vector z(d);
  for (Index i = 0; i < Y.size(); ++i) {
    for (Index j = 0; j < d; ++j) z(j) = rng.normal();
    const auto k = static_cast<std::size_t>(Y.label(i));
    X.row(i) = (means[k] + factors[k] * z).transpose();
  }
  return X;
}

SparseMatrix adjacency_matrix(const Graph& graph) {
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(2 * graph.edge_count()));
  for (Index i = 0; i < graph.node_count(); ++i) {
    for (Index j : graph.neighbors(i)) triplets.emplace_back(i, j, 1.0);
  }
  SparseMatrix A(graph.node_count(), graph.node_count());
  A.setFromTriplets(triplets.begin(), triplets.end());
  return A;
}

Matrix dense_adjacency(const Graph& graph) {
  Matrix A = Matrix::Zero(graph.node_count(), graph.node_count());
  for (Index i = 0; i < graph.node_count(); ++i) {
    for (Index j : graph.neighbors(i)) A(i, j) = 1.0;
  }
  return A;
}

SparseMatrix normalized_adjacency(const Graph& graph) {
  const Index n = graph.node_count();
  Vector inv_root(n);
  for (Index i = 0; i < n; ++i) {
    const Index d = graph.degree(i);
    inv_root(i) = d > 0 ? 1.0 / std::sqrt(static_cast<double>(d)) : 0.0;
  }
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(2 * graph.edge_count()));
  for (Index i = 0; i < n; ++i) {
    for (Index j : graph.neighbors(i)) triplets.emplace_back(i, j, inv_root(i) * inv_root(j));
  }
  SparseMatrix S(n, n);
  S.setFromTriplets(triplets.begin(), triplets.end());
  return S;
}

SparseMatrix graph_operator(const Graph& graph, OperatorKind kind) {
  return kind == OperatorKind::Adjacency ? adjacency_matrix(graph) : normalized_adjacency(graph);
}

std::string to_string(OperatorKind kind) {
  return kind == OperatorKind::Adjacency ? "adj" : "norm";
}

OperatorKind parse_operator_kind(const std::string& text) {
  if (text == "adj" || text == "adjacency" || text == "A") return OperatorKind::Adjacency;
  if (text == "norm" || text == "normalized" || text == "normalized-adjacency") {
    return OperatorKind::NormalizedAdjacency;
  }
  throw std::invalid_argument("unknown operator '" + text + "' (expected adj or norm)");
}

Graph drop_edges(const Graph& graph, double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw std::invalid_argument("drop_edges: fraction must lie in [0, 1]");
  }
  auto edges = graph.edges();
  const auto m = edges.size();
  const auto remove = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(m)));
  Rng rng(seed);
  // Partial Fisher-Yates: the first `remove` slots become the dropped set.
  for (std::size_t i = 0; i < remove; ++i) {
    const auto j = i + static_cast<std::size_t>(rng.below(m - i));
    std::swap(edges[i], edges[j]);
  }
  std::vector<Edge> kept(edges.begin() + static_cast<std::ptrdiff_t>(remove), edges.end());
  std::sort(kept.begin(), kept.end());
  return Graph::from_edges(graph.node_count(), kept, graph.latent(), graph.gamma());
}

DegreeSummary degree_summary(const Graph& graph) {
  DegreeSummary s;
  const Index n = graph.node_count();
  if (n == 0) return s;
  s.min = graph.degree(0);
  Index total = 0;
  for (Index i = 0; i < n; ++i) {
    const Index d = graph.degree(i);
    total += d;
    s.min = std::min(s.min, d);
    s.max = std::max(s.max, d);
    if (d == 0) ++s.isolated;
  }
  s.mean = static_cast<double>(total) / static_cast<double>(n);

  std::vector<Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (const auto& [i, j] : graph.edges()) parent[find(i)] = find(j);
  for (Index i = 0; i < n; ++i) {
    if (find(i) == i) ++s.components;
  }
  return s;
}

}  // namespace dsgm
