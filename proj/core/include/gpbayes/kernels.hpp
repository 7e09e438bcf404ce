#pragma once

#include "gpbayes/types.hpp"

#include <string_view>

namespace gpbayes {

/// Stationary isotropic covariance families with closed forms.
///
/// Matern kernels are restricted to half-integer smoothness nu = q + 1/2, q in {0,1,2};
/// the squared exponential is the nu -> infinity limit.
enum class KernelFamily { Matern12, Matern32, Matern52, SquaredExponential };

/// Config spelling: "matern12", "matern32", "matern52", "sqexp".
std::string_view to_string(KernelFamily family);
KernelFamily parse_kernel_family(std::string_view name);

/// Smoothness nu of the family (infinity for the squared exponential).
double smoothness(KernelFamily family);

/// Covariance family plus hyperparameters. Immutable and cheap to copy.
class KernelSpec {
 public:
  /// Throws InvalidArgument unless lengthscale > 0 and variance > 0 (both finite).
  KernelSpec(KernelFamily family, double lengthscale, double variance);

  [[nodiscard]] KernelFamily family() const noexcept { return family_; }
  [[nodiscard]] double lengthscale() const noexcept { return lengthscale_; }
  [[nodiscard]] double variance() const noexcept { return variance_; }

  /// k as a function of the Euclidean distance r >= 0.
  [[nodiscard]] double at_distance(double r) const noexcept;

  /// k(u, v); throws InvalidArgument on dimension mismatch.
  [[nodiscard]] double operator()(const Point& u, const Point& v) const;

  [[nodiscard]] KernelSpec with_hyperparameters(double lengthscale, double variance) const {
    return KernelSpec(family_, lengthscale, variance);
  }

 private:
  KernelFamily family_;
  double lengthscale_;
  double variance_;
};

double eval_kernel(const KernelSpec& spec, const Point& u, const Point& v);

/// K_ij = k(points_i, points_j), filled once per unordered pair so it is exactly symmetric.
Eigen::MatrixXd kernel_matrix(const KernelSpec& spec, const PointSet& points);

/// [k(u, design_1), ..., k(u, design_N)].
Eigen::VectorXd kernel_cross(const KernelSpec& spec, const Point& u, const PointSet& design);

/// Rectangular cross-covariance C_ij = k(rows_i, cols_j).
Eigen::MatrixXd kernel_cross(const KernelSpec& spec, const PointSet& rows, const PointSet& cols);

}  // namespace gpbayes
