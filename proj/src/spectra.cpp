#include "dsgm/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "dsgm/csv.hpp"

namespace dsgm {

namespace {

void fix_sign(Eigen::Ref<Vector> v) {
  const double peak = v.cwiseAbs().maxCoeff();
  if (peak == 0.0) return;
  for (Index i = 0; i < v.size(); ++i) {
    if (std::abs(v(i)) >= peak * (1.0 - 1e-12)) {
      if (v(i) < 0.0) v = -v;
      return;
    }
  }
}

}  // namespace

SpectralDecomposition canonicalize(const Vector& values, const Matrix& vectors) {
  const Index n = values.size();
  if (vectors.cols() != n) throw std::invalid_argument("canonicalize: eigenpair count mismatch");

  // Solver order is ascending; remember it as the tie-break key.
  std::vector<Index> ascending(n);
  std::iota(ascending.begin(), ascending.end(), Index{0});
  std::stable_sort(ascending.begin(), ascending.end(),
                   [&](Index a, Index b) { return values(a) < values(b); });
  std::vector<Index> rank(n);
  for (Index r = 0; r < n; ++r) rank[ascending[r]] = r;

  std::vector<Index> order(n);
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) {
    return std::abs(values(a)) > std::abs(values(b));
  });

  // Group runs of numerically equal magnitude and reorder inside each run.
  const double scale = n > 0 ? std::max(1.0, values.cwiseAbs().maxCoeff()) : 1.0;
  const double tie = 1e-10 * scale;
  for (Index start = 0; start < n;) {
    Index stop = start + 1;
    while (stop < n &&
           std::abs(std::abs(values(order[stop - 1])) - std::abs(values(order[stop]))) <= tie) {
      ++stop;
    }
    std::stable_sort(order.begin() + start, order.begin() + stop, [&](Index a, Index b) {
      const bool pa = values(a) > tie;
      const bool pb = values(b) > tie;
      if (pa != pb) return pa;
      return rank[a] < rank[b];
    });
    start = stop;
  }

  SpectralDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(vectors.rows(), n);
  for (Index i = 0; i < n; ++i) {
    out.eigenvalues(i) = values(order[i]);
    out.eigenvectors.col(i) = vectors.col(order[i]);
    fix_sign(out.eigenvectors.col(i));
  }
  return out;
}

SpectralDecomposition eig_sym(const Matrix& S) {
  if (S.rows() != S.cols()) throw std::invalid_argument("eig_sym: matrix must be square");
  if (!S.allFinite()) throw std::invalid_argument("eig_sym: matrix has non-finite entries");
  const Matrix sym = 0.5 * (S + S.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> solver(sym);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eig_sym: solver did not converge");
  return canonicalize(solver.eigenvalues(), solver.eigenvectors());
}

Embedding spectral_embedding(const SpectralDecomposition& decomp, Index K) {
  if (K < 1 || K > decomp.size()) {
    throw std::out_of_range("spectral_embedding: K=" + std::to_string(K) + " outside [1, " +
                            std::to_string(decomp.size()) + "]");
  }
  return {decomp.eigenvectors.leftCols(K), "SE(K=" + std::to_string(K) + ")"};
}

Matrix feature_gram_eigenvectors(const Matrix& X, Index kappa, bool center) {
  const Index n = X.rows();
  const Index d = X.cols();
  if (kappa < 0 || kappa > std::min(n, d)) {
    throw std::out_of_range("feature embedding: kappa=" + std::to_string(kappa) +
                            " exceeds min(N, D)");
  }
  if (kappa == 0) return Matrix(n, 0);
  Matrix Xc = X;
  if (center) Xc.rowwise() -= X.colwise().mean();

  // Narrow feature matrices go through the D x D Gram matrix: X w = sigma u.
  if (d < n) {
    Eigen::SelfAdjointEigenSolver<Matrix> small(Xc.transpose() * Xc);
    if (small.info() == Eigen::Success) {
      const Vector sigma2 = small.eigenvalues();
      const double floor = 1e-10 * std::max(1.0, sigma2.cwiseAbs().maxCoeff());
      if (sigma2(d - kappa) > floor) {
        Vector values(kappa);
        Matrix vectors(n, kappa);
        for (Index j = 0; j < kappa; ++j) {
          const Index src = d - 1 - j;
          values(j) = sigma2(src);
          vectors.col(j) = Xc * small.eigenvectors().col(src) / std::sqrt(sigma2(src));
        }
        return canonicalize(values, vectors).eigenvectors;
      }
    }
  }
  const auto full = eig_sym(Xc * Xc.transpose());
  return full.eigenvectors.leftCols(kappa);
}

Embedding feature_aware_embedding(const SpectralDecomposition& decomp, const Matrix& X, Index K,
                                  Index kappa, bool center) {
  if (X.rows() != decomp.eigenvectors.rows()) {
    throw std::invalid_argument("feature_aware_embedding: feature rows do not match node count");
  }
  auto base = spectral_embedding(decomp, K);
  if (kappa == 0) return base;
  const Matrix extra = feature_gram_eigenvectors(X, kappa, center);
  Embedding out;
  out.values.resize(X.rows(), K + kappa);
  out.values << base.values, extra;
  out.provenance = "SE(K=" + std::to_string(K) + ",kappa=" + std::to_string(kappa) + ")";
  return out;
}

Matrix gft(const Matrix& V, const Matrix& signals) {
  if (V.rows() != signals.rows()) throw std::invalid_argument("gft: dimension mismatch");
  return V.transpose() * signals;
}

Matrix inverse_gft(const Matrix& V, const Matrix& coefficients) {
  if (V.cols() != coefficients.rows()) throw std::invalid_argument("inverse_gft: dimension mismatch");
  return V * coefficients;
}

Vector filter_frequency_response(std::span<const double> taps, const Vector& eigenvalues) {
  Vector response = Vector::Zero(eigenvalues.size());
  // Horner per eigenvalue.
  for (auto it = taps.rbegin(); it != taps.rend(); ++it) {
    response = response.cwiseProduct(eigenvalues) + Vector::Constant(eigenvalues.size(), *it);
  }
  return response;
}

namespace {

std::vector<Index> decreasing_order(const Vector& eigenvalues) {
  std::vector<Index> order(eigenvalues.size());
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index a, Index b) { return eigenvalues(a) > eigenvalues(b); });
  return order;
}

}  // namespace

void write_frequency_response_csv(std::ostream& out, const Vector& eigenvalues,
                                  const Matrix& coefficients) {
  if (coefficients.rows() != eigenvalues.size()) {
    throw std::invalid_argument("frequency response: row count must match eigenvalue count");
  }
  CsvWriter csv(out);
  std::vector<std::string> header{"index", "eigenvalue"};
  for (Index c = 0; c < coefficients.cols(); ++c) header.push_back("channel_" + std::to_string(c));
  csv.row(header);
  const auto order = decreasing_order(eigenvalues);
  for (std::size_t r = 0; r < order.size(); ++r) {
    std::vector<std::string> fields{std::to_string(r), format_double(eigenvalues(order[r]))};
    for (Index c = 0; c < coefficients.cols(); ++c) {
      fields.push_back(format_double(coefficients(order[r], c)));
    }
    csv.row(fields);
  }
}

double top_energy_fraction(const Vector& eigenvalues, const Matrix& coefficients, Index top) {
  const double total = coefficients.squaredNorm();
  if (total == 0.0) return 0.0;
  const auto order = decreasing_order(eigenvalues);
  double head = 0.0;
  for (Index r = 0; r < std::min<Index>(top, static_cast<Index>(order.size())); ++r) {
    head += coefficients.row(order[r]).squaredNorm();
  }
  return head / total;
}

}  // namespace dsgm
