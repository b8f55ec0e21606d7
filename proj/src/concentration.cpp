#include "dsgm/concentration.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "dsgm/graph.hpp"
#include "dsgm/spectra.hpp"

namespace dsgm {

void ConcentrationParams::validate() const {
  if (lipschitz < 0.0 || truncation < 0.0 || gamma < 0.0 || nodes < 0 || epsilon < 0.0) {
    throw std::invalid_argument("concentration parameters must be nonnegative");
  }
  if (!(chi > 0.0 && chi < 1.0)) throw std::invalid_argument("chi must lie in (0, 1)");
  if (beta_value() < 0.0) throw std::invalid_argument("beta must be nonnegative");
}

double ConcentrationParams::beta_value() const {
  return beta ? beta(chi, static_cast<double>(nodes)) : 0.0;
}

double ConcentrationParams::linear_term() const {
  const double beta_term = nodes > 0 ? beta_value() / static_cast<double>(nodes) : 0.0;
  return 4.0 * lipschitz * truncation * gamma + beta_term + epsilon;
}

EigenvalueBound eigenvalue_bound(const ConcentrationParams& params) {
  params.validate();
  const double beta_term = params.nodes > 0 ? params.beta_value() / static_cast<double>(params.nodes) : 0.0;
  EigenvalueBound b;
  b.linear = params.linear_term();
  b.quadratic = 2.0 * params.lipschitz * static_cast<double>(params.nodes) * params.gamma * params.gamma +
                beta_term + params.epsilon;
  return b;
}

double eigenvector_bound(const ConcentrationParams& params, double delta_k) {
  if (!(delta_k > 0.0)) {
    throw std::domain_error("eigenvector bound undefined: spectral separation delta_k must be positive");
  }
  params.validate();
  return std::numbers::pi / (2.0 * delta_k) * params.linear_term();
}

double compute_delta_k(std::span<const double> kernel_eigs, std::span<const double> induced_eigs,
                       Index k) {
  if (kernel_eigs.empty() || induced_eigs.empty()) {
    throw std::invalid_argument("compute_delta_k: spectra must be nonempty");
  }
  const auto idx = static_cast<std::size_t>(k - 1);
  if (k < 1 || idx >= kernel_eigs.size() || idx >= induced_eigs.size()) {
    throw std::out_of_range("compute_delta_k: k outside both spectra");
  }
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < induced_eigs.size(); ++i) {
    if (i != idx) best = std::min(best, std::abs(kernel_eigs[idx] - induced_eigs[i]));
  }
  for (std::size_t i = 0; i < kernel_eigs.size(); ++i) {
    if (i != idx) best = std::min(best, std::abs(induced_eigs[idx] - kernel_eigs[i]));
  }
  return best;
}

InducedSpectrum induced_kernel_spectrum(const Graph& graph, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("induced_kernel_spectrum: gamma must be positive");
  const Index n = graph.node_count();
  if (n < 2) throw std::invalid_argument("induced_kernel_spectrum: need at least two nodes");
  const Matrix A = dense_adjacency(graph).topLeftCorner(n - 1, n - 1);
  const auto decomp = eig_sym(A);
  InducedSpectrum out;
  out.eigenvalues = gamma * decomp.eigenvalues;
  out.step_heights = decomp.eigenvectors / std::sqrt(gamma);
  out.breakpoints = graph.latent() ? *graph.latent() : latent_grid(n, gamma);
  if (static_cast<Index>(out.breakpoints.size()) != n) {
    throw std::invalid_argument("induced_kernel_spectrum: latent grid does not match graph");
  }
  return out;
}

GapReport empirical_gap(const KernelSpectrum& kernel, const InducedSpectrum& induced, Index k,
                        const ConcentrationParams& params) {
  if (k < 1 || k > kernel.count() || k > induced.eigenvalues.size()) {
    throw std::invalid_argument("empirical_gap: k=" + std::to_string(k) + " exceeds available eigenpairs");
  }
  const Index cells = induced.step_heights.rows();
  if (static_cast<Index>(induced.breakpoints.size()) != cells + 1) {
    throw std::invalid_argument("empirical_gap: grid/graph mismatch");
  }
  const Index col = k - 1;
  GapReport r;
  r.k = k;
  r.lambda_kernel = kernel.eigenvalues(col);
  r.lambda_induced = induced.eigenvalues(col);
  r.eigenvalue_gap = std::abs(r.lambda_induced - r.lambda_kernel);

  // Midpoint sub-samples inside each interval of the support of W_N.
  constexpr int kSub = 4;
  double cross = 0.0;
  double plus = 0.0;
  double minus = 0.0;
  for (Index c = 0; c < cells; ++c) {
    const double lo = induced.breakpoints[c];
    const double width = induced.breakpoints[c + 1] - lo;
    const double step = induced.step_heights(c, col);
    for (int s = 0; s < kSub; ++s) {
      const double u = lo + (s + 0.5) * width / kSub;
      const double phi = kernel.eigenfunction(col, u);
      const double w = width / kSub;
      cross += w * phi * step;
      plus += w * (phi - step) * (phi - step);
      minus += w * (phi + step) * (phi + step);
    }
  }
  r.eigenfunction_gap_unaligned = std::sqrt(plus);
  r.eigenfunction_gap = std::sqrt(cross >= 0.0 ? plus : minus);

  const double total = kernel.mass(col, -std::numeric_limits<double>::infinity(),
                                   std::numeric_limits<double>::infinity());
  const double inside = kernel.mass(col, induced.breakpoints.front(), induced.breakpoints.back());
  r.kernel_tail_mass = std::max(0.0, total - inside);

  std::vector<double> kernel_eigs(kernel.eigenvalues.data(),
                                  kernel.eigenvalues.data() + kernel.eigenvalues.size());
  std::vector<double> induced_eigs(induced.eigenvalues.data(),
                                   induced.eigenvalues.data() + induced.eigenvalues.size());
  r.delta_k = compute_delta_k(kernel_eigs, induced_eigs, k);
  r.bound_eigenvalue = eigenvalue_bound(params).value();
  r.bound_eigenvector = r.delta_k > 0.0 ? eigenvector_bound(params, r.delta_k)
                                        : std::numeric_limits<double>::infinity();

  ConcentrationParams zero_beta = params;
  zero_beta.beta = nullptr;
  const double base = zero_beta.linear_term();
  const double n = static_cast<double>(std::max<Index>(params.nodes, 1));
  double needed = std::max(0.0, r.eigenvalue_gap - eigenvalue_bound(zero_beta).value());
  if (r.delta_k > 0.0) {
    needed = std::max(needed, r.eigenfunction_gap * 2.0 * r.delta_k / std::numbers::pi - base);
  }
  r.beta_residual = needed * n;
  return r;
}

GapReport empirical_gap(const KernelSpectrum& kernel, const Graph& graph, double gamma, Index k,
                        const ConcentrationParams& params) {
  return empirical_gap(kernel, induced_kernel_spectrum(graph, gamma), k, params);
}

ConcentrationParams grid_params(const Kernel& kernel, Index n, double gamma, Index lipschitz_grid) {
  const auto grid = latent_grid(n, gamma);
  ConcentrationParams p;
  p.truncation = grid.back();
  p.gamma = gamma;
  p.nodes = n;
  p.epsilon = tail_mass(kernel, p.truncation);
  p.lipschitz = lipschitz_estimate(kernel, p.truncation, lipschitz_grid);
  return p;
}

}  // namespace dsgm
