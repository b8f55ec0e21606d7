#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "dsgm/types.hpp"

namespace dsgm {

class Kernel;

using Edge = std::pair<Index, Index>;

/// Undirected simple graph stored as sorted neighbor lists. Immutable once built.
class Graph {
 public:
  Graph() = default;
  /// Edgeless graph on n nodes.
  explicit Graph(Index n);

  /// Builds from an undirected edge list. Duplicates (in either orientation) are
  /// merged; self-loops and out-of-range endpoints throw std::invalid_argument.
  static Graph from_edges(Index n, std::span<const Edge> edges,
                          std::optional<std::vector<double>> latent = std::nullopt,
                          std::optional<double> gamma = std::nullopt);

  Index node_count() const { return static_cast<Index>(neighbors_.size()); }
  Index edge_count() const { return edge_count_; }
  Index degree(Index i) const { return static_cast<Index>(neighbors_[i].size()); }
  const std::vector<Index>& neighbors(Index i) const { return neighbors_[i]; }
  bool has_edge(Index i, Index j) const;
  /// Edges with i < j in lexicographic order.
  std::vector<Edge> edges() const;

  const std::optional<std::vector<double>>& latent() const { return latent_; }
  std::optional<double> gamma() const { return gamma_; }

 private:
  std::vector<std::vector<Index>> neighbors_;
  Index edge_count_ = 0;
  std::optional<std::vector<double>> latent_;
  std::optional<double> gamma_;
};

/// Hard community labels 0..K-1, one per node.
class CommunityAssignment {
 public:
  CommunityAssignment() = default;
  CommunityAssignment(std::vector<int> labels, int classes);
  /// Rows must be one-hot; throws std::invalid_argument naming the first bad row.
  static CommunityAssignment from_one_hot(const Matrix& Y);

  Index size() const { return static_cast<Index>(labels_.size()); }
  int classes() const { return classes_; }
  int label(Index i) const { return labels_[i]; }
  const std::vector<int>& labels() const { return labels_; }
  Matrix one_hot() const;
  std::vector<Index> members(int k) const;

 private:
  std::vector<int> labels_;
  int classes_ = 0;
};

/// Contiguous balanced blocks: node i belongs to floor(i * K / n).
CommunityAssignment balanced_communities(Index n, int classes);
/// Label 0 for u >= 0 and 1 for u < 0 (degree-corrected SBK ground truth).
CommunityAssignment sign_communities(std::span<const double> latent);

/// u_1 = -floor(n/2) gamma + gamma/2, u_i = u_1 + (i - 1) gamma.
std::vector<double> latent_grid(Index n, double gamma);

/// Dense-sparse graph model: A_ij ~ Ber(W(u_i, u_j)) independently for i < j on the
/// latent grid; zero diagonal. The latent coordinates and gamma are stored.
Graph sample_dsgm(const Kernel& kernel, Index n, double gamma, std::uint64_t seed);

/// Stochastic block model with P = Y B Y^T. Throws std::invalid_argument when B is
/// not square/symmetric, has entries outside [0, 1], or does not match Y's classes.
Graph sample_sbm(const CommunityAssignment& Y, const Matrix& B, std::uint64_t seed);

/// Row i ~ N(means[label_i], covariances[label_i]). Throws std::invalid_argument for
/// shape mismatches or a covariance that is not symmetric positive semidefinite.
Matrix sample_gaussian_mixture_features(const CommunityAssignment& Y,
                                        const std::vector<Vector>& means,
                                        const std::vector<Matrix>& covariances,
                                        std::uint64_t seed);

SparseMatrix adjacency_matrix(const Graph& graph);
Matrix dense_adjacency(const Graph& graph);
/// D^{-1/2} A D^{-1/2}; rows and columns of isolated nodes are zero.
SparseMatrix normalized_adjacency(const Graph& graph);

enum class OperatorKind { Adjacency, NormalizedAdjacency };
SparseMatrix graph_operator(const Graph& graph, OperatorKind kind);
std::string to_string(OperatorKind kind);
/// Accepts "adj"/"adjacency" and "norm"/"normalized".
OperatorKind parse_operator_kind(const std::string& text);

/// Removes exactly round(fraction * m) edges chosen uniformly at random.
Graph drop_edges(const Graph& graph, double fraction, std::uint64_t seed);

struct DegreeSummary {
  double mean = 0.0;
  Index min = 0;
  Index max = 0;
  Index isolated = 0;
  Index components = 0;
};
DegreeSummary degree_summary(const Graph& graph);

struct EdgeListStats {
  Index lines = 0;        // edge lines read
  Index duplicates = 0;   // repeated pairs, either orientation
  Index self_loops = 0;   // "i i" lines, dropped
};

/// Edge-list text: one "i j" pair per line, 0-based ids, each undirected edge once.
/// Blank lines and '#' comments are ignored. Repeated pairs are merged and
/// self-loops dropped (both counted in `stats`). When `node_count` is absent it is
/// max id + 1. Parse errors throw std::runtime_error with the line number.
Graph read_edge_list(std::istream& in, std::optional<Index> node_count = std::nullopt,
                     EdgeListStats* stats = nullptr);
Graph read_edge_list(const std::string& path, std::optional<Index> node_count = std::nullopt,
                     EdgeListStats* stats = nullptr);
void write_edge_list(std::ostream& out, const Graph& graph);
void write_edge_list(const std::string& path, const Graph& graph);

}  // namespace dsgm
