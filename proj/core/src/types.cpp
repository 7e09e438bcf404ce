#include "gpbayes/types.hpp"

#include "gpbayes/errors.hpp"

namespace gpbayes {

Box::Box(Eigen::VectorXd lo, Eigen::VectorXd hi) : lower(std::move(lo)), upper(std::move(hi)) {
  if (lower.size() != upper.size() || lower.size() == 0) {
    throw InvalidArgument("Box: lower and upper must be non-empty and of equal dimension");
  }
  for (Eigen::Index i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) throw InvalidArgument("Box: lower must be strictly below upper");
  }
}

Box Box::interval(double lo, double hi) { return Box(point1(lo), point1(hi)); }

bool Box::contains(const Point& u) const {
  if (u.size() != lower.size()) return false;
  return ((u.array() >= lower.array()) && (u.array() <= upper.array())).all();
}

double Box::volume() const { return (upper - lower).prod(); }

PointSet points1(const std::vector<double>& xs) {
  PointSet out;
  out.reserve(xs.size());
  for (double x : xs) out.push_back(point1(x));
  return out;
}

PointSet linspace1(double lo, double hi, std::size_t n) {
  PointSet out;
  out.reserve(n);
  if (n == 1) {
    out.push_back(point1(lo));
    return out;
  }
  const double step = (hi - lo) / static_cast<double>(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back(point1(i + 1 == n ? hi : lo + step * static_cast<double>(i)));
  }
  return out;
}

}  // namespace gpbayes
