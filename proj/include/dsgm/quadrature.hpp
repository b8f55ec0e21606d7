#pragma once

#include <functional>
#include <limits>

namespace dsgm {

using Function1d = std::function<double(double)>;
using Function2d = std::function<double(double, double)>;

/// Composite trapezoidal rule on [a, b] with `intervals` equal subintervals.
double trapezoid(const Function1d& f, double a, double b, int intervals);

/// Half-line integrals use the compactified coordinate u = origin + dir * t / (1 - t),
/// t in [0, 1), with the midpoint rule in t. A finite `radius` truncates the
/// half-line at |u - origin| = radius; infinity integrates the whole half-line.
struct HalfLineRule {
  int nodes = 1 << 14;
  double radius = std::numeric_limits<double>::infinity();
};

struct QuadratureResult {
  double value = 0.0;
  /// |I(n) - I(n/2)|, a refinement estimate of the discretization error.
  double refinement_error = 0.0;
};

/// Integral of f over [origin, origin + radius) (direction +1) or
/// (origin - radius, origin] (direction -1).
QuadratureResult half_line_integral(const Function1d& f, double origin, int direction,
                                    const HalfLineRule& rule = {});

/// Integral of f(u, v) over the product of two half-lines, same conventions.
double half_plane_product_integral(const Function2d& f, double u_origin, int u_direction,
                                   double v_origin, int v_direction, const HalfLineRule& rule);

}  // namespace dsgm
