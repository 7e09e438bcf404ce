#pragma once

#include "gpbayes/design.hpp"
#include "gpbayes/gp.hpp"
#include "gpbayes/quadrature.hpp"

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace gpbayes {

struct HellingerResult {
  double value = 0.0;
  /// Grid masses of p and q before renormalization.
  double mass_p = 1.0;
  double mass_q = 1.0;
  /// Set when either mass was off by more than 1e-3 and got renormalized.
  std::string warning;
};

/// (1/2 int (sqrt p - sqrt q)^2)^{1/2} by the grid's trapezoid rule. Both densities are
/// renormalized on the grid; throws InvalidArgument on negative values.
HellingerResult hellinger(const DensityFn& p, const DensityFn& q, const QuadratureGrid& grid);
HellingerResult hellinger(std::span<const double> p_values, std::span<const double> q_values,
                          const QuadratureGrid& grid);

/// Closed form for two univariate Gaussians.
double hellinger_gaussian(double m1, double s1, double m2, double s2);

/// (int (f - approx)^2 weight)^{1/2} by the grid's trapezoid rule. The weight is
/// renormalized on the grid.
double weighted_l2_error(const std::function<double(const Point&)>& f,
                         const std::function<double(const Point&)>& approx, const DensityFn& weight,
                         const QuadratureGrid& grid);

/// Grid over mean +- 8 sd of a univariate Gaussian weight.
QuadratureGrid gaussian_weight_grid(double mean, double sd, std::size_t nodes = 1025);

/// Settings of the replicated design-error functional
/// e(N, nu) = int E_nu |m_N(u) - f(u)|^2 mu(du).
struct DesignErrorOptions {
  std::vector<std::size_t> n_list;
  std::size_t replications = 1000;
  std::uint64_t seed = 0;
  int threads = 1;
  /// Redraws allowed per replication when the kernel matrix cannot be factorized.
  std::size_t max_resample_attempts = 20;
};

/// Posterior weight mu: its density and the quadrature grid it is integrated on.
struct WeightSpec {
  DensityFn density;
  QuadratureGrid grid;
  std::string description;
};

struct ErrorCell {
  std::size_t n = 0;
  double measure_param = 0.0;
  double e = 0.0;
  double std_error = 0.0;
  std::size_t replications = 0;
  std::size_t resamples = 0;
};

struct ErrorReport {
  std::vector<ErrorCell> cells;
  std::string kernel;
  std::string target;
  std::string weight;
  std::uint64_t seed = 0;
  std::vector<std::string> warnings;

  /// The cell for (n, measure index); cells are stored measure-major.
  [[nodiscard]] const ErrorCell& at(std::size_t measure_index, std::size_t n_index) const;
  std::size_t n_count = 0;
};

/// Squared weighted error int |m_N - f|^2 mu of a noiseless GP fit on one design, using
/// precomputed f values on the weight grid.
double design_squared_error(const GPPrior& prior, const Design& design, const std::function<double(const Point&)>& f,
                            const WeightSpec& weight, std::span<const double> f_on_grid,
                            std::span<const double> normalized_weights);

/// Replicated Monte Carlo estimate of e(N, nu) for every (measure, N). Replication r of
/// (measure m, N index i) draws from stream_seed(seed, (m * |N| + i) * R + r); a design
/// whose kernel matrix fails to factorize is redrawn from the same stream and counted.
/// More than 10% resamples in a cell adds a warning.
ErrorReport design_error_study(const std::function<double(const Point&)>& f, const std::string& f_name,
                               const GPPrior& prior, const WeightSpec& weight,
                               const std::vector<DesignMeasure>& measures, const std::vector<double>& measure_params,
                               const DesignErrorOptions& options);

}  // namespace gpbayes
