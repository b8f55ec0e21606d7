#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>

#include "dsgm/types.hpp"

namespace dsgm {

/// Eigenpairs of a symmetric operator.
///
/// Eigenvalues are ordered by decreasing absolute value. Ties in absolute value
/// put the positive eigenvalue first and otherwise keep the solver's ascending
/// order. Each eigenvector is signed so that its largest-magnitude entry is
/// positive (first such entry when several share the maximum).
struct SpectralDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;  // column i pairs with eigenvalues(i)

  Index size() const { return eigenvalues.size(); }
};

/// Applies the canonical ordering and sign convention to raw eigenpairs.
SpectralDecomposition canonicalize(const Vector& values, const Matrix& vectors);

/// Full dense decomposition. The input is symmetrized as (S + S^T) / 2.
/// Throws std::invalid_argument on non-finite or non-square input.
SpectralDecomposition eig_sym(const Matrix& S);

/// y = S x for a symmetric operator of fixed dimension.
using LinearOperator = std::function<void(const Vector& x, Vector& y)>;

struct LanczosOptions {
  double tolerance = 1e-10;          // residual, relative to max(1, |lambda_1|)
  std::uint64_t seed = 0x1a2c05ULL;  // start vector
};

/// Leading `count` eigenpairs by magnitude using Lanczos with full
/// reorthogonalization. The Krylov dimension grows until the selected Ritz
/// pairs converge, so the result agrees with eig_sym on the overlapping pairs.
SpectralDecomposition eig_sym_top(const LinearOperator& op, Index n, Index count,
                                  const LanczosOptions& options = {});
SpectralDecomposition eig_sym_top(const Matrix& S, Index count, const LanczosOptions& options = {});
SpectralDecomposition eig_sym_top(const SparseMatrix& S, Index count,
                                  const LanczosOptions& options = {});

struct Embedding {
  Matrix values;
  std::string provenance;

  Index dimension() const { return values.cols(); }
};

/// First K eigenvectors in |lambda|-descending order.
Embedding spectral_embedding(const SpectralDecomposition& decomp, Index K);

/// [V_K  V'_kappa]: graph eigenvectors concatenated with the leading
/// eigenvectors of the feature Gram matrix X X^T. Centering is off by default.
Embedding feature_aware_embedding(const SpectralDecomposition& decomp, const Matrix& X, Index K,
                                  Index kappa, bool center = false);

/// Leading `kappa` eigenvectors of X X^T (optionally after centering the columns of X).
Matrix feature_gram_eigenvectors(const Matrix& X, Index kappa, bool center = false);

/// Graph Fourier transform V^T s, applied column-wise.
Matrix gft(const Matrix& V, const Matrix& signals);
Matrix inverse_gft(const Matrix& V, const Matrix& coefficients);

/// h_hat(lambda_i) = sum_k h_k lambda_i^k.
Vector filter_frequency_response(std::span<const double> taps, const Vector& eigenvalues);

/// Writes (index, eigenvalue, channel_0, ...) rows sorted by decreasing eigenvalue.
/// `coefficients` rows pair with `eigenvalues`.
void write_frequency_response_csv(std::ostream& out, const Vector& eigenvalues,
                                  const Matrix& coefficients);

/// Fraction of total energy carried by the `top` rows with the largest eigenvalues.
double top_energy_fraction(const Vector& eigenvalues, const Matrix& coefficients, Index top);

}  // namespace dsgm
