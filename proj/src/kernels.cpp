#include "dsgm/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "dsgm/graph.hpp"
#include "dsgm/spectra.hpp"

namespace dsgm {

namespace {

void check_probability(double value, const char* what) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw std::invalid_argument(std::string(what) + " must lie in [0, 1]");
  }
}

double block_value(double u, double v, double p, double q) { return u * v >= 0.0 ? p : q; }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

Index cell_of(const std::vector<double>& breaks, double u) {
  if (u < breaks.front() || u > breaks.back()) return -1;
  const auto it = std::upper_bound(breaks.begin(), breaks.end(), u);
  const Index idx = static_cast<Index>(it - breaks.begin()) - 1;
  return std::min<Index>(idx, static_cast<Index>(breaks.size()) - 2);
}

}  // namespace

double synthetic_degree(double u) {
  const double s = std::abs(u) + 1.0;
  return 1.0 / (s * s);
}

Kernel Kernel::degree_corrected_sbk(double p, double q, DegreeFunction theta) {
  check_probability(p, "p");
  check_probability(q, "q");
  if (!theta) throw std::invalid_argument("degree function is empty");
  // theta must map into [0, 1]; probe a wide grid since it cannot be checked symbolically.
  for (int i = -4000; i <= 4000; ++i) {
    const double u = 0.025 * i;
    const double t = theta(u);
    if (!(t >= 0.0 && t <= 1.0)) {
      throw std::invalid_argument("degree function leaves [0, 1] at u=" + std::to_string(u));
    }
  }
  return Kernel(DegreeCorrectedSbk{p, q, std::move(theta)});
}

Kernel Kernel::synthetic_pq(double p, double q) {
  check_probability(p, "p");
  check_probability(q, "q");
  return Kernel(SyntheticPq{p, q});
}

Kernel Kernel::piecewise_constant(Matrix values, std::vector<double> breakpoints) {
  const auto cells = static_cast<Index>(breakpoints.size()) - 1;
  if (cells < 1) throw std::invalid_argument("piecewise-constant kernel needs at least one cell");
  if (values.rows() != cells || values.cols() != cells) {
    throw std::invalid_argument("piecewise-constant values must be a cells x cells matrix");
  }
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] > breakpoints[i - 1])) {
      throw std::invalid_argument("breakpoints must be strictly increasing");
    }
  }
  if ((values - values.transpose()).cwiseAbs().maxCoeff() > 0.0) {
    throw std::invalid_argument("piecewise-constant values must be symmetric");
  }
  if (values.minCoeff() < 0.0 || values.maxCoeff() > 1.0) {
    throw std::invalid_argument("piecewise-constant values must lie in [0, 1]");
  }
  return Kernel(PiecewiseConstant{std::move(values), std::move(breakpoints)});
}

Kernel Kernel::constant(double w) {
  check_probability(w, "constant kernel value");
  const double root = std::sqrt(w);
  return Kernel(DegreeCorrectedSbk{1.0, 1.0, [root](double) { return root; }});
}

Kernel Kernel::generic(std::function<double(double, double)> fn, std::string name) {
  if (!fn) throw std::invalid_argument("generic kernel callable is empty");
  return Kernel(GenericKernel{std::move(fn), std::move(name)});
}

double Kernel::operator()(double u, double v) const {
  return std::visit(
      Overloaded{
          [&](const DegreeCorrectedSbk& k) {
            return k.theta(u) * k.theta(v) * block_value(u, v, k.p, k.q);
          },
          [&](const SyntheticPq& k) {
            return synthetic_degree(u) * synthetic_degree(v) * block_value(u, v, k.p, k.q);
          },
          [&](const PiecewiseConstant& k) {
            const Index i = cell_of(k.breakpoints, u);
            const Index j = cell_of(k.breakpoints, v);
            return (i < 0 || j < 0) ? 0.0 : k.values(i, j);
          },
          [&](const GenericKernel& k) { return k.fn(u, v); },
      },
      variant_);
}

std::string Kernel::name() const {
  return std::visit(Overloaded{
                        [](const DegreeCorrectedSbk&) { return std::string("degree-corrected-sbk"); },
                        [](const SyntheticPq&) { return std::string("synthetic-pq"); },
                        [](const PiecewiseConstant&) { return std::string("piecewise-constant"); },
                        [](const GenericKernel& k) { return k.name; },
                    },
                    variant_);
}

SbkSpectrum sbk_closed_form_spectrum(double p, double q, const DegreeFunction& theta,
                                     const HalfLineRule& rule) {
  if (!theta) throw std::invalid_argument("degree function is empty");
  auto squared = [&](double u) {
    const double t = theta(u);
    return t * t;
  };
  const auto right = half_line_integral(squared, 0.0, +1, rule);
  // The left half-line is open at 0; midpoint nodes never touch u = 0.
  const auto left = half_line_integral(squared, 0.0, -1, rule);
  for (const auto* part : {&right, &left}) {
    if (!std::isfinite(part->value) ||
        part->refinement_error > 1e-3 * std::max(std::abs(part->value), 1e-300)) {
      throw std::domain_error(
          "degree function is not square-integrable: quadrature does not settle (refinement change " +
          std::to_string(part->refinement_error) + ")");
    }
  }
  const double a = right.value;
  const double b = left.value;
  if (a <= 0.0 && b <= 0.0) throw std::domain_error("degree function vanishes identically");

  SbkSpectrum out;
  out.quadrature_error = right.refinement_error + left.refinement_error;

  // Coordinates in the orthonormal pair {theta 1+ / sqrt(a), theta 1- / sqrt(b)}.
  Eigen::Matrix2d reduced;
  reduced << p * a, q * std::sqrt(a * b), q * std::sqrt(a * b), p * b;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(reduced);
  Eigen::Vector2d values = solver.eigenvalues();
  Eigen::Matrix2d vectors = solver.eigenvectors();
  const auto sorted = canonicalize(values, vectors);

  auto make_phi = [&](Eigen::Vector2d coef) -> DegreeFunction {
    if (coef(0) < 0.0 || (coef(0) == 0.0 && coef(1) < 0.0)) coef = -coef;
    const double right_scale = a > 0.0 ? coef(0) / std::sqrt(a) : 0.0;
    const double left_scale = b > 0.0 ? coef(1) / std::sqrt(b) : 0.0;
    return [theta, right_scale, left_scale](double u) {
      return theta(u) * (u >= 0.0 ? right_scale : left_scale);
    };
  };
  out.lambda1 = sorted.eigenvalues(0);
  out.lambda2 = sorted.eigenvalues(1);
  out.phi1 = make_phi(sorted.eigenvectors.col(0));
  out.phi2 = make_phi(sorted.eigenvectors.col(1));
  return out;
}

double KernelSpectrum::eigenfunction(Index k, double u) const {
  if (layout == Layout::Cells) {
    const Index cell = cell_of(breakpoints, u);
    return cell < 0 ? 0.0 : eigenfunctions(cell, k);
  }
  const Index m = grid.size();
  if (u < grid(0) || u > grid(m - 1)) return 0.0;
  const double pos = (u - grid(0)) / spacing;
  const Index i = std::min<Index>(static_cast<Index>(pos), m - 2);
  const double frac = pos - static_cast<double>(i);
  return (1.0 - frac) * eigenfunctions(i, k) + frac * eigenfunctions(i + 1, k);
}

double KernelSpectrum::mass(Index k, double lo, double hi) const {
  double total = 0.0;
  if (layout == Layout::Cells) {
    for (Index c = 0; c + 1 < static_cast<Index>(breakpoints.size()); ++c) {
      const double overlap =
          std::max(0.0, std::min(hi, breakpoints[c + 1]) - std::max(lo, breakpoints[c]));
      total += overlap * eigenfunctions(c, k) * eigenfunctions(c, k);
    }
    return total;
  }
  for (Index i = 0; i < grid.size(); ++i) {
    if (grid(i) >= lo && grid(i) <= hi) total += weights(i) * eigenfunctions(i, k) * eigenfunctions(i, k);
  }
  return total;
}

namespace {

KernelSpectrum from_weighted(const Matrix& weighted, const Vector& weights, Index count) {
  const Index m = weighted.rows();
  const auto decomp = m <= 600 ? eig_sym(weighted) : eig_sym_top(weighted, count);
  KernelSpectrum out;
  out.eigenvalues = decomp.eigenvalues.head(count);
  out.eigenfunctions = decomp.eigenvectors.leftCols(count);
  const Vector inv_root = weights.cwiseSqrt().cwiseInverse();
  out.eigenfunctions = inv_root.asDiagonal() * out.eigenfunctions;
  out.weights = weights;
  return out;
}

}  // namespace

KernelSpectrum discretize_kernel_spectrum(const Kernel& kernel, double c, Index m, Index count) {
  if (!(c > 0.0)) throw std::invalid_argument("discretize_kernel_spectrum: c must be positive");
  if (count < 1) throw std::invalid_argument("discretize_kernel_spectrum: count must be positive");

  if (const auto* pc = std::get_if<PiecewiseConstant>(&kernel.variant())) {
    const Index cells = pc->values.rows();
    if (count > cells) {
      throw std::invalid_argument("discretize_kernel_spectrum: " + std::to_string(cells) +
                                  " cells cannot resolve " + std::to_string(count) + " eigenpairs");
    }
    Vector widths(cells);
    Vector mids(cells);
    for (Index i = 0; i < cells; ++i) {
      widths(i) = pc->breakpoints[i + 1] - pc->breakpoints[i];
      mids(i) = 0.5 * (pc->breakpoints[i + 1] + pc->breakpoints[i]);
    }
    const Vector root = widths.cwiseSqrt();
    const Matrix weighted = root.asDiagonal() * pc->values * root.asDiagonal();
    auto out = from_weighted(weighted, widths, count);
    out.grid = mids;
    out.breakpoints = pc->breakpoints;
    out.spacing = widths.maxCoeff();
    out.truncation = std::max(std::abs(pc->breakpoints.front()), std::abs(pc->breakpoints.back()));
    out.layout = KernelSpectrum::Layout::Cells;
    return out;
  }

  if (m < 16) throw std::invalid_argument("discretize_kernel_spectrum: grid size must be >= 16");
  if (count > m) {
    throw std::invalid_argument("discretize_kernel_spectrum: grid of " + std::to_string(m) +
                                " nodes cannot resolve " + std::to_string(count) + " eigenpairs");
  }
  const double h = 2.0 * c / static_cast<double>(m - 1);
  Vector grid(m);
  Vector weights = Vector::Constant(m, h);
  for (Index i = 0; i < m; ++i) grid(i) = -c + h * static_cast<double>(i);
  weights(0) = weights(m - 1) = 0.5 * h;

  const Vector root = weights.cwiseSqrt();
  Matrix weighted(m, m);
  for (Index j = 0; j < m; ++j) {
    for (Index i = j; i < m; ++i) {
      weighted(i, j) = weighted(j, i) = root(i) * kernel(grid(i), grid(j)) * root(j);
    }
  }
  auto out = from_weighted(weighted, weights, count);
  out.grid = grid;
  out.spacing = h;
  out.truncation = c;
  out.layout = KernelSpectrum::Layout::Nodal;
  return out;
}

double tail_mass(const Kernel& kernel, double c, const HalfLineRule& rule) {
  if (!(c > 0.0)) throw std::invalid_argument("tail_mass: c must be positive");
  auto f = [&](double u, double v) { return kernel(u, v); };
  double total = 0.0;
  for (int su : {+1, -1}) {
    for (int sv : {+1, -1}) {
      total += half_plane_product_integral(f, su * c, su, sv * c, sv, rule);
    }
  }
  return total;
}

double lipschitz_estimate(const Kernel& kernel, double c, Index m) {
  if (m < 32) throw std::invalid_argument("lipschitz_estimate: grid size must be >= 32");
  if (!(c > 0.0)) throw std::invalid_argument("lipschitz_estimate: c must be positive");
  const double h = 2.0 * c / static_cast<double>(m - 1);
  Matrix values(m, m);
  for (Index i = 0; i < m; ++i) {
    for (Index j = i; j < m; ++j) {
      values(i, j) = values(j, i) = kernel(-c + h * i, -c + h * j);
    }
  }
  double best = 0.0;
  for (Index i = 1; i + 1 < m; ++i) {
    for (Index j = 1; j + 1 < m; ++j) {
      const double du = (values(i + 1, j) - values(i - 1, j)) / (2.0 * h);
      const double dv = (values(i, j + 1) - values(i, j - 1)) / (2.0 * h);
      best = std::max(best, std::hypot(du, dv));
    }
  }
  return best;
}

Kernel induced_kernel(const Graph& graph, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("induced_kernel: gamma must be positive");
  const Index n = graph.node_count();
  if (n < 2) throw std::invalid_argument("induced_kernel: graph needs at least two nodes");
  std::vector<double> grid = graph.latent() ? *graph.latent() : latent_grid(n, gamma);
  for (Index i = 1; i < n; ++i) {
    if (std::abs(grid[i] - grid[i - 1] - gamma) > 1e-9 * std::max(1.0, gamma)) {
      throw std::invalid_argument("induced_kernel: latent spacing does not match gamma");
    }
  }
  Matrix values = Matrix::Zero(n - 1, n - 1);
  for (Index i = 0; i + 1 < n; ++i) {
    for (Index j : graph.neighbors(i)) {
      if (j + 1 < n) values(i, j) = 1.0;
    }
  }
  return Kernel::piecewise_constant(std::move(values), std::move(grid));
}

}  // namespace dsgm
