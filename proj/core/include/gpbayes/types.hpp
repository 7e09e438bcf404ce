#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <vector>

namespace gpbayes {

/// A point of the parameter space R^{d_u}.
using Point = Eigen::VectorXd;

/// Ordered list of points; used for designs, grids and sample sets.
using PointSet = std::vector<Eigen::VectorXd>;

/// Axis-aligned box [lower, upper] in R^d.
struct Box {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  Box() = default;
  Box(Eigen::VectorXd lo, Eigen::VectorXd hi);
  static Box interval(double lo, double hi);

  [[nodiscard]] int dim() const { return static_cast<int>(lower.size()); }
  [[nodiscard]] bool contains(const Point& u) const;
  [[nodiscard]] double volume() const;
};

inline Point point1(double x) {
  Point p(1);
  p[0] = x;
  return p;
}

inline Point point2(double x, double y) {
  Point p(2);
  p << x, y;
  return p;
}

/// Wraps scalar coordinates as 1-D points.
PointSet points1(const std::vector<double>& xs);

/// Evenly spaced 1-D points from lo to hi inclusive.
PointSet linspace1(double lo, double hi, std::size_t n);

}  // namespace gpbayes
