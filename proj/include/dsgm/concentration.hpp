#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dsgm/kernels.hpp"
#include "dsgm/types.hpp"

namespace dsgm {

class Graph;

/// beta(chi, N): sublinear high-probability term. Supplied by the caller.
using BetaFunction = std::function<double(double chi, double n)>;

struct ConcentrationParams {
  double lipschitz = 0.0;   // A_w on [-c, c]^2
  double truncation = 0.0;  // c
  double gamma = 0.0;
  Index nodes = 0;          // N
  double chi = 0.05;        // failure probability
  BetaFunction beta;        // empty means beta == 0
  double epsilon = 0.0;     // tail mass outside [-c, c]^2

  /// Throws std::invalid_argument for negative entries or chi outside (0, 1).
  void validate() const;
  double beta_value() const;
  /// 4 A_w c gamma + beta / N + eps.
  double linear_term() const;
};

/// Both forms of the eigenvalue perturbation bound.
struct EigenvalueBound {
  double linear = 0.0;     // 4 A_w c gamma + beta/N + eps
  double quadratic = 0.0;  // 2 A_w N gamma^2 + beta/N + eps
  double value() const { return linear < quadratic ? linear : quadratic; }
};

EigenvalueBound eigenvalue_bound(const ConcentrationParams& params);

/// (pi / (2 delta_k)) (4 A_w c gamma + beta/N + eps). Throws std::domain_error for delta_k <= 0.
double eigenvector_bound(const ConcentrationParams& params, double delta_k);

/// min over i != k of |lambda_k(W) - lambda_i(W_N)| and |lambda_k(W_N) - lambda_i(W)|.
/// `k` is 1-based, matching the eigenvalue numbering lambda_1, lambda_2, ...
double compute_delta_k(std::span<const double> kernel_eigs, std::span<const double> induced_eigs,
                       Index k);

/// Exact spectrum of the induced kernel W_N: eigenvalues gamma * lambda(A') and step
/// heights v / sqrt(gamma), where A' is the adjacency restricted to the first N - 1
/// nodes (the nodes that own an interval). Ordered by decreasing |lambda|.
struct InducedSpectrum {
  Vector eigenvalues;
  Matrix step_heights;             // rows: intervals I_0 .. I_{N-2}
  std::vector<double> breakpoints; // u_1 .. u_N
};
InducedSpectrum induced_kernel_spectrum(const Graph& graph, double gamma);

struct GapReport {
  Index k = 0;
  double lambda_kernel = 0.0;
  double lambda_induced = 0.0;
  double eigenvalue_gap = 0.0;
  double eigenfunction_gap = 0.0;            // after sign alignment
  double eigenfunction_gap_unaligned = 0.0;  // as returned by the solvers
  double kernel_tail_mass = 0.0;             // mass of phi_k(W)^2 outside [u_1, u_N]
  double delta_k = 0.0;
  double bound_eigenvalue = 0.0;
  double bound_eigenvector = 0.0;
  /// Smallest beta for which both bounds cover the measured gaps.
  double beta_residual = 0.0;
};

/// Compares eigenpair k (1-based) of a kernel with that of a graph's induced kernel.
/// Eigenfunction distances are L2 over the support of W_N; bounds come from `params`.
/// Throws std::invalid_argument when k exceeds either spectrum.
GapReport empirical_gap(const KernelSpectrum& kernel, const InducedSpectrum& induced, Index k,
                        const ConcentrationParams& params);
GapReport empirical_gap(const KernelSpectrum& kernel, const Graph& graph, double gamma, Index k,
                        const ConcentrationParams& params);

/// Parameters for a graph on the latent grid: c = u_N, eps = tail_mass(c), and A_w
/// from lipschitz_estimate on an m x m grid.
ConcentrationParams grid_params(const Kernel& kernel, Index n, double gamma,
                                Index lipschitz_grid = 401);

}  // namespace dsgm
