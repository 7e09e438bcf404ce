#include "gpbayes/kernels.hpp"

#include "gpbayes/errors.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace gpbayes {

namespace {

constexpr double kSqrt3 = 1.7320508075688772935;
constexpr double kSqrt5 = 2.2360679774997896964;
// Distances below this fraction of the lengthscale count as coincident points.
constexpr double kCoincidentFraction = 1e-14;

void check_dims(const Point& u, const Point& v) {
  if (u.size() != v.size()) {
    throw InvalidArgument("kernel: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                          std::to_string(v.size()) + ")");
  }
}

double distance(const Point& u, const Point& v) {
  double acc = 0.0;
  for (Eigen::Index i = 0; i < u.size(); ++i) {
    const double d = u[i] - v[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

}  // namespace

std::string_view to_string(KernelFamily family) {
  switch (family) {
    case KernelFamily::Matern12: return "matern12";
    case KernelFamily::Matern32: return "matern32";
    case KernelFamily::Matern52: return "matern52";
    case KernelFamily::SquaredExponential: return "sqexp";
  }
  return "unknown";
}

KernelFamily parse_kernel_family(std::string_view name) {
  if (name == "matern12") return KernelFamily::Matern12;
  if (name == "matern32") return KernelFamily::Matern32;
  if (name == "matern52") return KernelFamily::Matern52;
  if (name == "sqexp") return KernelFamily::SquaredExponential;
  throw InvalidArgument("unknown kernel family '" + std::string(name) +
                        "' (expected matern12, matern32, matern52 or sqexp)");
}

double smoothness(KernelFamily family) {
  switch (family) {
    case KernelFamily::Matern12: return 0.5;
    case KernelFamily::Matern32: return 1.5;
    case KernelFamily::Matern52: return 2.5;
    case KernelFamily::SquaredExponential: return std::numeric_limits<double>::infinity();
  }
  return 0.0;
}

KernelSpec::KernelSpec(KernelFamily family, double lengthscale, double variance)
    : family_(family), lengthscale_(lengthscale), variance_(variance) {
  if (!(lengthscale > 0.0) || !std::isfinite(lengthscale)) {
    throw InvalidArgument("kernel lengthscale must be positive and finite");
  }
  if (!(variance > 0.0) || !std::isfinite(variance)) {
    throw InvalidArgument("kernel variance must be positive and finite");
  }
}

double KernelSpec::at_distance(double r) const noexcept {
  if (r < kCoincidentFraction * lengthscale_) return variance_;
  const double s = r / lengthscale_;
  switch (family_) {
    case KernelFamily::Matern12:
      return variance_ * std::exp(-s);
    case KernelFamily::Matern32:
      return variance_ * (1.0 + kSqrt3 * s) * std::exp(-kSqrt3 * s);
    case KernelFamily::Matern52:
      return variance_ * (1.0 + kSqrt5 * s + 5.0 * s * s / 3.0) * std::exp(-kSqrt5 * s);
    case KernelFamily::SquaredExponential:
      return variance_ * std::exp(-0.5 * s * s);
  }
  return 0.0;
}

double KernelSpec::operator()(const Point& u, const Point& v) const {
  check_dims(u, v);
  return at_distance(distance(u, v));
}

double eval_kernel(const KernelSpec& spec, const Point& u, const Point& v) { return spec(u, v); }

Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const PointSet& points) {
  const auto n = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    k(i, i) = spec.variance();
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = spec(points[static_cast<std::size_t>(i)], points[static_cast<std::size_t>(j)]);
      k(i, j) = v;
      k(j, i) = v;
    }
  }
  return k;
}

Eigen::VectorXd kernel_cross(const KernelSpec& spec, const Point& u, const PointSet& design) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(design.size()));
  for (std::size_t n = 0; n < design.size(); ++n) out[static_cast<Eigen::Index>(n)] = spec(u, design[n]);
  return out;
}

Eigen::MatrixXd kernel_cross(const KernelSpec& spec, const PointSet& rows, const PointSet& cols) {
  Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) {
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = spec(rows[i], cols[j]);
    }
  }
  return out;
}

}  // namespace gpbayes
