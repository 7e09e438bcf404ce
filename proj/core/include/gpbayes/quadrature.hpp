#pragma once

#include "gpbayes/types.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace gpbayes {

/// Composite trapezoid rule on a tensor grid over a box (d <= 2).
struct QuadratureGrid {
  Box box;
  std::vector<std::size_t> shape;  // nodes per dimension
  PointSet nodes;                  // row-major: last coordinate fastest
  std::vector<double> weights;

  [[nodiscard]] std::size_t size() const { return nodes.size(); }
  [[nodiscard]] int dim() const { return box.dim(); }

  /// Sum of w_i f(x_i).
  [[nodiscard]] double integrate(const std::function<double(const Point&)>& f) const;
  [[nodiscard]] double integrate(std::span<const double> values) const;
};

inline constexpr std::size_t kDefaultNodes1D = 4096;
inline constexpr std::size_t kDefaultNodes2D = 512;

/// Builds a trapezoid grid; nodes_per_dim = 0 selects 4096 (1-D) or 512 (2-D).
QuadratureGrid trapezoid_grid(const Box& box, std::size_t nodes_per_dim = 0);

/// log(sum_i exp(x_i)) with max subtraction; -inf for empty or all -inf input.
double log_sum_exp(std::span<const double> xs);

/// log(sum_i w_i exp(x_i)) for non-negative weights.
double log_weighted_sum_exp(std::span<const double> log_values, std::span<const double> weights);

}  // namespace gpbayes
