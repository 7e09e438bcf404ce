#pragma once

#include "gpbayes/kernels.hpp"
#include "gpbayes/types.hpp"

#include <array>
#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace gpbayes {

/// Training inputs D_N.
using Design = PointSet;
/// Observed values f(D_N), one per design point.
using Observations = Eigen::VectorXd;

/// Prior mean m(u). Constants and fixed polynomials cover the usual choices; a callable
/// variant exists for anything else.
class MeanFunction {
 public:
  MeanFunction() = default;  // zero

  static MeanFunction zero() { return {}; }
  static MeanFunction constant(double c);
  /// c_0 + sum_j sum_{k>=1} c_k u_j^k, i.e. the same univariate polynomial applied to
  /// each coordinate, with the constant counted once.
  static MeanFunction polynomial(std::vector<double> coefficients);
  static MeanFunction callable(std::function<double(const Point&)> fn, std::string description = "callable");

  [[nodiscard]] double operator()(const Point& u) const;
  [[nodiscard]] bool is_zero() const noexcept { return kind_ == Kind::Zero; }
  [[nodiscard]] const std::string& description() const noexcept { return description_; }

 private:
  enum class Kind { Zero, Constant, Polynomial, Callable };
  Kind kind_ = Kind::Zero;
  std::vector<double> coefficients_;
  std::function<double(const Point&)> fn_;
  std::string description_ = "zero";
};

struct GPPrior {
  MeanFunction mean;
  KernelSpec kernel;
};

/// Diagonal jitter ladder, in units of the kernel variance; the first level whose
/// factorization succeeds is used.
inline constexpr std::array<double, 5> kJitterLadder{0.0, 1e-12, 1e-10, 1e-8, 1e-6};

/// A factorization whose smallest squared pivot falls below this fraction of the
/// kernel variance is treated as failed: the pivot is at round-off level.
inline constexpr double kMinPivotFraction = 1e-13;

struct JitteredCholesky {
  Eigen::MatrixXd lower;
  double jitter = 0.0;  // absolute value added to the diagonal
};

/// Cholesky of A + jitter*I walking up kJitterLadder * scale.
/// Throws IllConditionedKernel carrying the smallest eigenvalue of A when every level fails.
JitteredCholesky factorize_with_jitter(const Eigen::MatrixXd& a, double scale);

/// Gaussian process conditioned on (possibly noisy) observations at a design.
///
/// Immutable after construction. Copies share the diagnostic counter of clamped
/// negative variances.
class GPPosterior {
 public:
  /// Conditions the prior on obs at design. noise_variance >= 0 adds sigma^2 I to the
  /// kernel matrix. Throws InvalidArgument on empty design or length mismatch and
  /// IllConditionedKernel when factorization fails at every jitter level.
  static GPPosterior fit(GPPrior prior, Design design, Observations obs, double noise_variance = 0.0);

  /// The prior itself viewed as a posterior with N = 0.
  static GPPosterior unconditioned(GPPrior prior);

  [[nodiscard]] double predict_mean(const Point& u) const;
  [[nodiscard]] double predict_cov(const Point& u, const Point& v) const;
  [[nodiscard]] double predict_var(const Point& u) const;

  [[nodiscard]] Eigen::VectorXd predict_mean(const PointSet& points) const;
  [[nodiscard]] Eigen::VectorXd predict_var(const PointSet& points) const;
  /// Joint predictive covariance on a point set; diagonal clamped like predict_var.
  [[nodiscard]] Eigen::MatrixXd predict_cov(const PointSet& points) const;

  [[nodiscard]] const GPPrior& prior() const noexcept { return prior_; }
  [[nodiscard]] const KernelSpec& kernel() const noexcept { return prior_.kernel; }
  [[nodiscard]] const Design& design() const noexcept { return design_; }
  [[nodiscard]] const Observations& observations() const noexcept { return observations_; }
  [[nodiscard]] double noise_variance() const noexcept { return noise_variance_; }
  [[nodiscard]] double jitter() const noexcept { return jitter_; }
  [[nodiscard]] const Eigen::MatrixXd& cholesky() const noexcept { return chol_; }
  [[nodiscard]] const Eigen::VectorXd& alpha() const noexcept { return alpha_; }
  /// Observations minus the prior mean at the design.
  [[nodiscard]] const Eigen::VectorXd& residuals() const noexcept { return residuals_; }
  [[nodiscard]] std::size_t size() const noexcept { return design_.size(); }
  [[nodiscard]] int dim() const noexcept { return dim_; }

  /// Number of predictive variances that came out negative and were clamped to 0.
  [[nodiscard]] std::size_t clamped_variance_count() const noexcept { return clamp_count_->load(); }

 private:
  GPPosterior(GPPrior prior) : prior_(std::move(prior)) {}

  void check_point(const Point& u) const;
  [[nodiscard]] Eigen::VectorXd whitened_cross(const Point& u) const;
  [[nodiscard]] double clamp_variance(double var, double prior_var) const;

  GPPrior prior_;
  Design design_;
  Observations observations_;
  double noise_variance_ = 0.0;
  double jitter_ = 0.0;
  int dim_ = -1;  // -1: unknown (unconditioned)
  Eigen::MatrixXd chol_;
  Eigen::VectorXd alpha_;
  Eigen::VectorXd residuals_;
  std::shared_ptr<std::atomic<std::size_t>> clamp_count_ = std::make_shared<std::atomic<std::size_t>>(0);
};

/// One draw of the process on a grid: mean + L xi with L the jittered Cholesky factor
/// of the grid covariance. Deterministic in the seed.
Eigen::VectorXd sample_path_on_grid(const GPPosterior& process, const PointSet& grid, std::uint64_t seed);
Eigen::VectorXd sample_path_on_grid(const GPPrior& process, const PointSet& grid, std::uint64_t seed);

/// `count` draws sharing one factorization; column s is draw s.
Eigen::MatrixXd sample_paths_on_grid(const GPPosterior& process, const PointSet& grid, std::size_t count,
                                     std::uint64_t seed);

/// log N(obs; m(D), K + sigma^2 I).
double log_marginal_likelihood(const GPPrior& prior, const Design& design, const Observations& obs,
                               double noise_variance = 0.0);

/// Log-spaced search ranges for (lambda, sigma_k^2).
struct HyperparameterGrid {
  double lengthscale_min = 1e-2;
  double lengthscale_max = 1e1;
  double variance_min = 1e-2;
  double variance_max = 1e1;
  std::size_t points = 25;
};

/// Maximizes the log marginal likelihood over the log grid, then refines each coordinate
/// once by golden-section search between the neighbouring grid nodes. Ties go to the
/// larger lengthscale.
KernelSpec fit_hyperparameters(KernelFamily family, const Design& design, const Observations& obs,
                               const HyperparameterGrid& grid, double noise_variance = 0.0,
                               const MeanFunction& mean = MeanFunction::zero());

/// RKHS norm of sum_i c_i k(., z_i): sqrt(c^T K c), clamped at 0.
double rkhs_norm(const KernelSpec& kernel, const PointSet& centers, const Eigen::VectorXd& coefficients);

}  // namespace gpbayes
