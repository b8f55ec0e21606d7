#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dsgm/rng.hpp"
#include "dsgm/spectra.hpp"

namespace dsgm {

namespace {

Vector random_unit(Rng& rng, Index n) {
  Vector v(n);
  for (Index i = 0; i < n; ++i) v(i) = rng.normal();
  return v.normalized();
}

// Two passes of classical Gram-Schmidt against the first `k` basis columns.
void orthogonalize(Vector& w, const Matrix& basis, Index k) {
  for (int pass = 0; pass < 2; ++pass) {
    const Vector proj = basis.leftCols(k).transpose() * w;
    w.noalias() -= basis.leftCols(k) * proj;
  }
}

}  // namespace

SpectralDecomposition eig_sym_top(const LinearOperator& op, Index n, Index count,
                                  const LanczosOptions& options) {
  if (count < 1 || count > n) throw std::out_of_range("eig_sym_top: count outside [1, n]");
  Rng rng(options.seed);

  Matrix basis(n, std::min<Index>(n, std::max<Index>(2 * count + 20, 40)));
  std::vector<double> alpha;
  std::vector<double> beta;  // beta[j] couples basis j and j + 1
  basis.col(0) = random_unit(rng, n);
  Index built = 0;
  double norm_estimate = 0.0;
  Vector w(n);

  Index target = basis.cols();
  while (true) {
    if (basis.cols() < target) basis.conservativeResize(Eigen::NoChange, target);
    for (Index j = built; j < target; ++j) {
      op(basis.col(j), w);
      alpha.push_back(basis.col(j).dot(w));
      orthogonalize(w, basis, j + 1);
      const double b = w.norm();
      norm_estimate = std::max(norm_estimate, std::abs(alpha.back()) + b);
      if (j + 1 == n) {
        beta.push_back(0.0);
        break;
      }
      if (j + 1 >= basis.cols()) basis.conservativeResize(Eigen::NoChange, j + 2);
      if (b <= 1e-12 * std::max(1.0, norm_estimate)) {
        // Invariant subspace found; continue from a fresh orthogonal direction.
        Vector fresh = random_unit(rng, n);
        orthogonalize(fresh, basis, j + 1);
        basis.col(j + 1) = fresh.normalized();
        beta.push_back(0.0);
      } else {
        basis.col(j + 1) = w / b;
        beta.push_back(b);
      }
    }
    built = static_cast<Index>(alpha.size());

    Matrix T = Matrix::Zero(built, built);
    for (Index j = 0; j < built; ++j) {
      T(j, j) = alpha[j];
      if (j + 1 < built) T(j, j + 1) = T(j + 1, j) = beta[j];
    }
    Eigen::SelfAdjointEigenSolver<Matrix> small(T);
    const Vector theta = small.eigenvalues();
    std::vector<Index> order(built);
    for (Index i = 0; i < built; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](Index a, Index b) { return std::abs(theta(a)) > std::abs(theta(b)); });

    const Index take = std::min(count, built);
    const double scale = std::max(1.0, std::abs(theta(order[0])));
    const double tail = built == n ? 0.0 : beta[built - 1];
    bool converged = take == count;
    for (Index i = 0; i < take && converged; ++i) {
      const double residual = std::abs(tail * small.eigenvectors()(built - 1, order[i]));
      converged = residual <= options.tolerance * scale;
    }
    if (converged || built == n) {
      Vector values(take);
      Matrix vectors(n, take);
      for (Index i = 0; i < take; ++i) {
        values(i) = theta(order[i]);
        vectors.col(i) = basis.leftCols(built) * small.eigenvectors().col(order[i]);
      }
      return canonicalize(values, vectors);
    }
    target = std::min(n, 2 * built);
  }
}

SpectralDecomposition eig_sym_top(const Matrix& S, Index count, const LanczosOptions& options) {
  if (S.rows() != S.cols()) throw std::invalid_argument("eig_sym_top: matrix must be square");
  return eig_sym_top([&](const Vector& x, Vector& y) { y.noalias() = S * x; },
                     S.rows(), count, options);
}

SpectralDecomposition eig_sym_top(const SparseMatrix& S, Index count, const LanczosOptions& options) {
  if (S.rows() != S.cols()) throw std::invalid_argument("eig_sym_top: matrix must be square");
  return eig_sym_top([&](const Vector& x, Vector& y) { y.noalias() = S * x; }, S.rows(), count,
                     options);
}

}  // namespace dsgm
