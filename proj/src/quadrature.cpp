#include "dsgm/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace dsgm {

double trapezoid(const Function1d& f, double a, double b, int intervals) {
  if (intervals < 1) throw std::invalid_argument("trapezoid: need at least one interval");
  const double h = (b - a) / intervals;
  double sum = 0.5 * (f(a) + f(b));
  for (int i = 1; i < intervals; ++i) sum += f(a + i * h);
  return sum * h;
}

namespace {

struct MappedNodes {
  std::vector<double> offsets;   // |u - origin|
  std::vector<double> weights;   // dt * du/dt
};

MappedNodes mapped_nodes(int n, double radius) {
  if (n < 2) throw std::invalid_argument("half-line quadrature: need at least two nodes");
  const double t_max = std::isinf(radius) ? 1.0 : radius / (1.0 + radius);
  const double dt = t_max / n;
  MappedNodes nodes;
  nodes.offsets.resize(n);
  nodes.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double t = (i + 0.5) * dt;
    const double s = 1.0 - t;
    nodes.offsets[i] = t / s;
    nodes.weights[i] = dt / (s * s);
  }
  return nodes;
}

double mapped_sum(const Function1d& f, double origin, int direction, int n, double radius) {
  const auto nodes = mapped_nodes(n, radius);
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += nodes.weights[i] * f(origin + direction * nodes.offsets[i]);
  return sum;
}

}  // namespace

QuadratureResult half_line_integral(const Function1d& f, double origin, int direction,
                                    const HalfLineRule& rule) {
  if (direction != 1 && direction != -1) throw std::invalid_argument("direction must be +1 or -1");
  QuadratureResult result;
  result.value = mapped_sum(f, origin, direction, rule.nodes, rule.radius);
  const double coarse = mapped_sum(f, origin, direction, rule.nodes / 2, rule.radius);
  result.refinement_error = std::abs(result.value - coarse);
  return result;
}

double half_plane_product_integral(const Function2d& f, double u_origin, int u_direction,
                                   double v_origin, int v_direction, const HalfLineRule& rule) {
  const auto nodes = mapped_nodes(rule.nodes, rule.radius);
  double sum = 0.0;
  for (int i = 0; i < rule.nodes; ++i) {
    const double u = u_origin + u_direction * nodes.offsets[i];
    double row = 0.0;
    for (int j = 0; j < rule.nodes; ++j) {
      row += nodes.weights[j] * f(u, v_origin + v_direction * nodes.offsets[j]);
    }
    sum += nodes.weights[i] * row;
  }
  return sum;
}

}  // namespace dsgm
