#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/LU>

#include "dsgm/gnn.hpp"

namespace dsgm {

CoefficientCheck spectral_coefficient_check(const SpectralDecomposition& decomp, const Vector& x,
                                            double tol) {
  const Index n = decomp.size();
  if (x.size() != n) throw std::invalid_argument("signal length does not match the operator");
  if (!(tol >= 0.0)) throw std::invalid_argument("tolerance must be non-negative");
  CoefficientCheck check;
  const Vector coeffs = decomp.eigenvectors.transpose() * x;
  Index worst = 0;
  coeffs.cwiseAbs().minCoeff(&worst);
  check.min_coefficient = std::abs(coeffs(worst));
  check.min_abs_eigenvalue = decomp.eigenvalues.cwiseAbs().minCoeff();

  std::vector<double> sorted(decomp.eigenvalues.data(), decomp.eigenvalues.data() + n);
  std::sort(sorted.begin(), sorted.end());
  check.min_gap = std::numeric_limits<double>::infinity();
  Index gap_at = 0;
  for (Index i = 1; i < n; ++i) {
    const double g = sorted[i] - sorted[i - 1];
    if (g < check.min_gap) {
      check.min_gap = g;
      gap_at = i;
    }
  }
  const double scale = std::max(1.0, decomp.eigenvalues.cwiseAbs().maxCoeff());
  std::ostringstream why;
  if (n > 1 && !(check.min_gap > tol * scale)) {
    why << "repeated eigenvalue near " << sorted[gap_at] << " (gap " << check.min_gap << ")";
  } else if (!(check.min_coefficient > tol * x.norm())) {
    why << "signal has spectral coefficient " << check.min_coefficient << " on eigenvector "
        << worst;
  }
  check.violation = why.str();
  check.ok = check.violation.empty();
  return check;
}

Vector apply_filter(const Matrix& A, const Vector& x, std::span<const double> h) {
  if (A.rows() != A.cols() || A.cols() != x.size()) {
    throw std::invalid_argument("apply_filter: shape mismatch");
  }
  Vector out = Vector::Zero(x.size());
  if (h.empty()) return out;
  // Horner: h_0 x + A(h_1 x + A(...)).
  out = h.back() * x;
  for (std::size_t k = h.size() - 1; k-- > 0;) out = A * out + h[k] * x;
  return out;
}

Vector interpolate_filter(const Matrix& A, const Vector& x, const Vector& y, double tol) {
  const Index n = A.rows();
  if (A.cols() != n || x.size() != n || y.size() != n) {
    throw std::invalid_argument("interpolate_filter: shape mismatch");
  }
  if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, A.cwiseAbs().maxCoeff())) {
    throw std::invalid_argument("interpolate_filter: operator must be symmetric");
  }
  const SpectralDecomposition decomp = eig_sym(A);
  const CoefficientCheck check = spectral_coefficient_check(decomp, x, tol);
  if (!check.ok) throw PreconditionError("interpolate_filter: " + check.violation);

  // Krylov basis of B = A / rho with unit-norm columns; h_k = g_k / (|c_k| rho^k).
  const double rho = std::max(decomp.eigenvalues.cwiseAbs().maxCoeff(), 1e-300);
  const Matrix B = A / rho;
  Matrix K(n, n);
  Vector col_scale(n);
  Vector c = x;
  for (Index k = 0; k < n; ++k) {
    if (k > 0) c = B * c;
    col_scale(k) = c.norm();
    if (!(col_scale(k) > 0.0)) throw PreconditionError("interpolate_filter: Krylov basis collapsed");
    K.col(k) = c / col_scale(k);
  }
  const Eigen::FullPivLU<Matrix> lu(K);
  Vector g = lu.solve(y);
  for (int it = 0; it < 3; ++it) g += lu.solve(y - K * g);

  Vector h(n);
  double power = 1.0;
  for (Index k = 0; k < n; ++k) {
    h(k) = g(k) / (col_scale(k) * power);
    power *= rho;
  }
  const Vector yhat = apply_filter(A, x, std::span<const double>(h.data(), h.size()));
  const double err = (yhat - y).lpNorm<Eigen::Infinity>();
  const double allowed = 1e-6 * std::max(1.0, y.lpNorm<Eigen::Infinity>());
  if (!std::isfinite(err) || err > allowed) {
    std::ostringstream msg;
    msg << "interpolate_filter: residual " << err << " exceeds " << allowed
        << " (Krylov system too ill-conditioned)";
    throw std::runtime_error(msg.str());
  }
  return h;
}

}  // namespace dsgm
