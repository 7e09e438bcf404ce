#include "gpbayes/quadrature.hpp"

#include "gpbayes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gpbayes {

namespace {

std::vector<double> trapezoid_weights_1d(std::size_t n, double h) {
  std::vector<double> w(n, h);
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

std::vector<double> axis_nodes(double lo, double hi, std::size_t n) {
  std::vector<double> x(n);
  const double h = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) x[i] = lo + h * static_cast<double>(i);
  x.back() = hi;
  return x;
}

}  // namespace

double QuadratureGrid::integrate(const std::function<double(const Point&)>& f) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < nodes.size(); ++i) acc += weights[i] * f(nodes[i]);
  return acc;
}

double QuadratureGrid::integrate(std::span<const double> values) const {
  if (values.size() != weights.size()) {
    throw InvalidArgument("QuadratureGrid::integrate: value count does not match node count");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) acc += weights[i] * values[i];
  return acc;
}

QuadratureGrid trapezoid_grid(const Box& box, std::size_t nodes_per_dim) {
  const int d = box.dim();
  if (d < 1 || d > 2) throw InvalidArgument("trapezoid_grid: only 1-D and 2-D boxes are supported");
  if (nodes_per_dim == 0) nodes_per_dim = d == 1 ? kDefaultNodes1D : kDefaultNodes2D;
  if (nodes_per_dim < 2) throw InvalidArgument("trapezoid_grid: need at least 2 nodes per dimension");

  QuadratureGrid grid;
  grid.box = box;
  grid.shape.assign(static_cast<std::size_t>(d), nodes_per_dim);

  std::vector<std::vector<double>> axes;
  std::vector<std::vector<double>> axis_weights;
  for (int k = 0; k < d; ++k) {
    axes.push_back(axis_nodes(box.lower[k], box.upper[k], nodes_per_dim));
    const double h = (box.upper[k] - box.lower[k]) / static_cast<double>(nodes_per_dim - 1);
    axis_weights.push_back(trapezoid_weights_1d(nodes_per_dim, h));
  }

  if (d == 1) {
    grid.nodes = points1(axes[0]);
    grid.weights = axis_weights[0];
    return grid;
  }
  grid.nodes.reserve(nodes_per_dim * nodes_per_dim);
  grid.weights.reserve(nodes_per_dim * nodes_per_dim);
  for (std::size_t i = 0; i < nodes_per_dim; ++i) {
    for (std::size_t j = 0; j < nodes_per_dim; ++j) {
      grid.nodes.push_back(point2(axes[0][i], axes[1][j]));
      grid.weights.push_back(axis_weights[0][i] * axis_weights[1][j]);
    }
  }
  return grid;
}

double log_sum_exp(std::span<const double> xs) {
  double m = -std::numeric_limits<double>::infinity();
  for (double x : xs) m = std::max(m, x);
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - m);
  return m + std::log(acc);
}

double log_weighted_sum_exp(std::span<const double> log_values, std::span<const double> weights) {
  if (log_values.size() != weights.size()) {
    throw InvalidArgument("log_weighted_sum_exp: size mismatch");
  }
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < log_values.size(); ++i) {
    if (weights[i] > 0.0) m = std::max(m, log_values[i]);
  }
  if (!std::isfinite(m)) return m;
  double acc = 0.0;
  for (std::size_t i = 0; i < log_values.size(); ++i) {
    if (weights[i] > 0.0) acc += weights[i] * std::exp(log_values[i] - m);
  }
  return m + std::log(acc);
}

}  // namespace gpbayes
