#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dsgm/quadrature.hpp"
#include "dsgm/types.hpp"

namespace dsgm {

class Graph;

using DegreeFunction = std::function<double(double)>;

/// W(u, v) = theta(u) theta(v) p when uv >= 0, theta(u) theta(v) q otherwise.
struct DegreeCorrectedSbk {
  double p = 0.8;
  double q = 0.2;
  DegreeFunction theta;
};

/// The degree-corrected SBK with theta(u) = (|u| + 1)^-2.
struct SyntheticPq {
  double p = 0.8;
  double q = 0.2;
};

/// values(i, j) on [b_i, b_{i+1}) x [b_j, b_{j+1}); the last cell is closed; zero outside.
struct PiecewiseConstant {
  Matrix values;
  std::vector<double> breakpoints;
};

/// Arbitrary symmetric kernel given as a callable; used for test kernels.
struct GenericKernel {
  std::function<double(double, double)> fn;
  std::string name = "generic";
};

/// Symmetric probability kernel W: R^2 -> [0, 1].
class Kernel {
 public:
  using Variant = std::variant<DegreeCorrectedSbk, SyntheticPq, PiecewiseConstant, GenericKernel>;

  static Kernel degree_corrected_sbk(double p, double q, DegreeFunction theta);
  static Kernel synthetic_pq(double p = 0.8, double q = 0.2);
  static Kernel piecewise_constant(Matrix values, std::vector<double> breakpoints);
  /// W == w everywhere.
  static Kernel constant(double w);
  static Kernel generic(std::function<double(double, double)> fn, std::string name);

  double operator()(double u, double v) const;
  const Variant& variant() const { return variant_; }
  std::string name() const;

 private:
  explicit Kernel(Variant v) : variant_(std::move(v)) {}
  Variant variant_;
};

/// theta(u) = (|u| + 1)^-2.
double synthetic_degree(double u);

inline double eval_kernel(const Kernel& kernel, double u, double v) { return kernel(u, v); }

/// Top two eigenpairs of a degree-corrected SBK operator on L2(R).
///
/// The operator has rank at most two with range spanned by theta 1{u >= 0} and
/// theta 1{u < 0}; the pairs come from the 2x2 reduced operator. For an even
/// theta they are ((p + q) a, theta / |theta|) and ((p - q) a, sign(u) theta / |theta|)
/// with a = int_0^inf theta^2.
struct SbkSpectrum {
  double lambda1 = 0.0;
  double lambda2 = 0.0;
  DegreeFunction phi1;
  DegreeFunction phi2;
  /// Refinement estimate of the quadrature error in the theta^2 integrals.
  double quadrature_error = 0.0;
};

/// Throws std::domain_error when theta^2 is not integrable (quadrature does not settle).
SbkSpectrum sbk_closed_form_spectrum(double p, double q, const DegreeFunction& theta,
                                     const HalfLineRule& rule = {});

/// Eigenpairs of a kernel integral operator sampled on a grid.
struct KernelSpectrum {
  enum class Layout {
    Nodal,  // trapezoidal nodes on [-c, c]; eigenfunctions interpolate linearly
    Cells,  // exact cell discretization of a piecewise-constant kernel
  };

  Vector eigenvalues;      // decreasing |lambda|
  Matrix eigenfunctions;   // rows: grid points (or cells); orthonormal under `weights`
  Vector grid;             // node positions (or cell midpoints)
  Vector weights;          // quadrature weights
  std::vector<double> breakpoints;  // Cells layout only
  double spacing = 0.0;
  double truncation = 0.0;
  Layout layout = Layout::Nodal;

  Index count() const { return eigenvalues.size(); }
  /// Value of eigenfunction k (0-based) at u; zero outside the discretized domain.
  double eigenfunction(Index k, double u) const;
  /// Integral of phi_k^2 over [lo, hi] under the grid quadrature.
  double mass(Index k, double lo, double hi) const;
};

/// Nystrom discretization on `m` trapezoidal nodes over [-c, c], symmetrized with
/// the square roots of the weights. Piecewise-constant kernels are discretized
/// exactly on their own cells instead. `count` pairs are returned.
///
/// An even `m` keeps the node grid off u = 0, where the SBK kernels jump; the
/// trapezoidal rule then stays second order.
KernelSpectrum discretize_kernel_spectrum(const Kernel& kernel, double c, Index m, Index count = 8);

/// int_{|u| >= c} int_{|v| >= c} W(u, v) du dv over the four tail quadrants.
double tail_mass(const Kernel& kernel, double c, const HalfLineRule& rule = {1024});

/// Largest central-difference gradient norm of W over an m x m grid on [-c, c]^2.
/// A lower bound on the true Lipschitz constant.
double lipschitz_estimate(const Kernel& kernel, double c, Index m);

/// Piecewise-constant kernel induced by a graph on its latent grid: value A_ij on
/// I_i x I_j for i, j < N - 1 (0-based), I_i = [u_i, u_{i+1}), last interval closed.
/// Uses the graph's stored latent coordinates when present.
Kernel induced_kernel(const Graph& graph, double gamma);

}  // namespace dsgm
