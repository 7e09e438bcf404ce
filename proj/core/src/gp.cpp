#include "gpbayes/gp.hpp"

#include "gpbayes/errors.hpp"
#include "gpbayes/random.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace gpbayes {

MeanFunction MeanFunction::constant(double c) {
  MeanFunction m;
  if (c == 0.0) return m;
  m.kind_ = Kind::Constant;
  m.coefficients_ = {c};
  std::ostringstream os;
  os << "constant(" << c << ")";
  m.description_ = os.str();
  return m;
}

MeanFunction MeanFunction::polynomial(std::vector<double> coefficients) {
  MeanFunction m;
  if (std::all_of(coefficients.begin(), coefficients.end(), [](double c) { return c == 0.0; })) return m;
  m.kind_ = Kind::Polynomial;
  m.coefficients_ = std::move(coefficients);
  m.description_ = "polynomial(degree " + std::to_string(m.coefficients_.size() - 1) + ")";
  return m;
}

MeanFunction MeanFunction::callable(std::function<double(const Point&)> fn, std::string description) {
  if (!fn) throw InvalidArgument("MeanFunction::callable: empty function");
  MeanFunction m;
  m.kind_ = Kind::Callable;
  m.fn_ = std::move(fn);
  m.description_ = std::move(description);
  return m;
}

double MeanFunction::operator()(const Point& u) const {
  switch (kind_) {
    case Kind::Zero:
      return 0.0;
    case Kind::Constant:
      return coefficients_[0];
    case Kind::Polynomial: {
      double acc = coefficients_[0];
      for (Eigen::Index j = 0; j < u.size(); ++j) {
        double power = 1.0;
        for (std::size_t k = 1; k < coefficients_.size(); ++k) {
          power *= u[j];
          acc += coefficients_[k] * power;
        }
      }
      return acc;
    }
    case Kind::Callable:
      return fn_(u);
  }
  return 0.0;
}

JitteredCholesky factorize_with_jitter(const Eigen::MatrixXd& a, double scale) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw InvalidArgument("factorize_with_jitter: matrix must be square");
  if (n == 0) return {Eigen::MatrixXd(0, 0), 0.0};
  for (double level : kJitterLadder) {
    const double jitter = level * scale;
    Eigen::MatrixXd shifted = a;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() != Eigen::Success) continue;
    Eigen::MatrixXd lower = llt.matrixL();
    const double min_pivot = lower.diagonal().minCoeff();
    if (!(min_pivot * min_pivot >= kMinPivotFraction * scale)) continue;
    return {std::move(lower), jitter};
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
  const double min_eig = eig.eigenvalues().minCoeff();
  std::ostringstream os;
  os << "kernel matrix (" << n << "x" << n << ") is ill-conditioned: factorization failed up to jitter "
     << kJitterLadder.back() * scale << "; smallest eigenvalue estimate " << min_eig;
  throw IllConditionedKernel(os.str(), min_eig);
}

GPPosterior GPPosterior::fit(GPPrior prior, Design design, Observations obs, double noise_variance) {
  if (design.empty()) throw InvalidArgument("GPPosterior::fit: design must contain at least one point");
  if (static_cast<std::size_t>(obs.size()) != design.size()) {
    throw InvalidArgument("GPPosterior::fit: " + std::to_string(obs.size()) + " observations for " +
                          std::to_string(design.size()) + " design points");
  }
  if (!(noise_variance >= 0.0) || !std::isfinite(noise_variance)) {
    throw InvalidArgument("GPPosterior::fit: noise variance must be finite and non-negative");
  }
  const auto dim = design.front().size();
  for (const auto& p : design) {
    if (p.size() != dim) throw InvalidArgument("GPPosterior::fit: design points have mixed dimensions");
  }

  GPPosterior post(std::move(prior));
  post.dim_ = static_cast<int>(dim);
  post.design_ = std::move(design);
  post.observations_ = std::move(obs);
  post.noise_variance_ = noise_variance;

  Eigen::MatrixXd k = kernel_matrix(post.prior_.kernel, post.design_);
  k.diagonal().array() += noise_variance;
  auto factor = factorize_with_jitter(k, post.prior_.kernel.variance());
  post.chol_ = std::move(factor.lower);
  post.jitter_ = factor.jitter;

  post.residuals_ = post.observations_;
  if (!post.prior_.mean.is_zero()) {
    for (std::size_t n = 0; n < post.design_.size(); ++n) {
      post.residuals_[static_cast<Eigen::Index>(n)] -= post.prior_.mean(post.design_[n]);
    }
  }
  const Eigen::VectorXd z = post.chol_.triangularView<Eigen::Lower>().solve(post.residuals_);
  post.alpha_ = post.chol_.transpose().triangularView<Eigen::Upper>().solve(z);
  return post;
}

GPPosterior GPPosterior::unconditioned(GPPrior prior) {
  GPPosterior post(std::move(prior));
  post.chol_.resize(0, 0);
  post.alpha_.resize(0);
  post.residuals_.resize(0);
  post.observations_.resize(0);
  return post;
}

void GPPosterior::check_point(const Point& u) const {
  if (dim_ >= 0 && u.size() != dim_) {
    throw InvalidArgument("GPPosterior: point of dimension " + std::to_string(u.size()) +
                          " for a process on R^" + std::to_string(dim_));
  }
}

Eigen::VectorXd GPPosterior::whitened_cross(const Point& u) const {
  Eigen::VectorXd ku = kernel_cross(prior_.kernel, u, design_);
  chol_.triangularView<Eigen::Lower>().solveInPlace(ku);
  return ku;
}

double GPPosterior::clamp_variance(double var, double prior_var) const {
  if (var < 0.0) {
    clamp_count_->fetch_add(1, std::memory_order_relaxed);
    return 0.0;
  }
  return std::min(var, prior_var);
}

double GPPosterior::predict_mean(const Point& u) const {
  check_point(u);
  double m = prior_.mean(u);
  if (!design_.empty()) m += kernel_cross(prior_.kernel, u, design_).dot(alpha_);
  return m;
}

double GPPosterior::predict_cov(const Point& u, const Point& v) const {
  check_point(u);
  check_point(v);
  const double prior_cov = prior_.kernel(u, v);
  if (design_.empty()) return prior_cov;
  const bool same = u == v;
  const Eigen::VectorXd wu = whitened_cross(u);
  const double cov = prior_cov - (same ? wu.squaredNorm() : wu.dot(whitened_cross(v)));
  return same ? clamp_variance(cov, prior_cov) : cov;
}

double GPPosterior::predict_var(const Point& u) const { return predict_cov(u, u); }

Eigen::VectorXd GPPosterior::predict_mean(const PointSet& points) const {
  Eigen::VectorXd m(static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    check_point(points[i]);
    m[static_cast<Eigen::Index>(i)] = prior_.mean(points[i]);
  }
  if (!design_.empty()) m += kernel_cross(prior_.kernel, points, design_) * alpha_;
  return m;
}

Eigen::VectorXd GPPosterior::predict_var(const PointSet& points) const {
  const double prior_var = prior_.kernel.variance();
  Eigen::VectorXd var = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(points.size()), prior_var);
  for (const auto& p : points) check_point(p);
  if (design_.empty()) return var;
  Eigen::MatrixXd w = kernel_cross(prior_.kernel, design_, points);
  chol_.triangularView<Eigen::Lower>().solveInPlace(w);
  for (Eigen::Index i = 0; i < var.size(); ++i) {
    var[i] = clamp_variance(prior_var - w.col(i).squaredNorm(), prior_var);
  }
  return var;
}

Eigen::MatrixXd GPPosterior::predict_cov(const PointSet& points) const {
  for (const auto& p : points) check_point(p);
  Eigen::MatrixXd cov = kernel_matrix(prior_.kernel, points);
  if (design_.empty()) return cov;
  Eigen::MatrixXd w = kernel_cross(prior_.kernel, design_, points);
  chol_.triangularView<Eigen::Lower>().solveInPlace(w);
  cov.noalias() -= w.transpose() * w;
  const double prior_var = prior_.kernel.variance();
  for (Eigen::Index i = 0; i < cov.rows(); ++i) cov(i, i) = clamp_variance(cov(i, i), prior_var);
  return cov;
}

Eigen::MatrixXd sample_paths_on_grid(const GPPosterior& process, const PointSet& grid, std::size_t count,
                                     std::uint64_t seed) {
  if (grid.empty()) throw InvalidArgument("sample_path_on_grid: grid must not be empty");
  const Eigen::VectorXd mean = process.predict_mean(grid);
  const Eigen::MatrixXd cov = process.predict_cov(grid);
  const auto factor = factorize_with_jitter(cov, process.kernel().variance());

  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::MatrixXd xi(mean.size(), static_cast<Eigen::Index>(count));
  for (Eigen::Index s = 0; s < xi.cols(); ++s) {
    for (Eigen::Index i = 0; i < xi.rows(); ++i) xi(i, s) = normal(rng);
  }
  Eigen::MatrixXd paths = factor.lower.triangularView<Eigen::Lower>() * xi;
  paths.colwise() += mean;
  return paths;
}

Eigen::VectorXd sample_path_on_grid(const GPPosterior& process, const PointSet& grid, std::uint64_t seed) {
  return sample_paths_on_grid(process, grid, 1, seed).col(0);
}

Eigen::VectorXd sample_path_on_grid(const GPPrior& process, const PointSet& grid, std::uint64_t seed) {
  return sample_path_on_grid(GPPosterior::unconditioned(process), grid, seed);
}

double log_marginal_likelihood(const GPPrior& prior, const Design& design, const Observations& obs,
                               double noise_variance) {
  const auto post = GPPosterior::fit(prior, design, obs, noise_variance);
  const double n = static_cast<double>(design.size());
  return -0.5 * post.residuals().dot(post.alpha()) - post.cholesky().diagonal().array().log().sum() -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

namespace {

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  if (n == 1) {
    out[0] = lo;
    return out;
  }
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (std::size_t i = 0; i < n; ++i) out[i] = std::exp(a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1));
  out.back() = hi;
  return out;
}

// Golden-section maximization of f on [lo, hi] (in log coordinates).
template <typename F>
std::pair<double, double> golden_max(F&& f, double lo, double hi, int iterations = 40) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo;
  double b = hi;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < iterations; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return fc >= fd ? std::pair{c, fc} : std::pair{d, fd};
}

}  // namespace

KernelSpec fit_hyperparameters(KernelFamily family, const Design& design, const Observations& obs,
                               const HyperparameterGrid& grid, double noise_variance, const MeanFunction& mean) {
  if (grid.points == 0) throw InvalidArgument("fit_hyperparameters: search grid must not be empty");
  if (!(grid.lengthscale_min > 0.0) || !(grid.variance_min > 0.0) || grid.lengthscale_max < grid.lengthscale_min ||
      grid.variance_max < grid.variance_min) {
    throw InvalidArgument("fit_hyperparameters: bounds must be positive and ordered");
  }
  auto objective = [&](double lengthscale, double variance) {
    try {
      return log_marginal_likelihood(GPPrior{mean, KernelSpec(family, lengthscale, variance)}, design, obs,
                                     noise_variance);
    } catch (const IllConditionedKernel&) {
      return -std::numeric_limits<double>::infinity();
    }
  };

  const auto lengthscales = log_grid(grid.lengthscale_min, grid.lengthscale_max, grid.points);
  const auto variances = log_grid(grid.variance_min, grid.variance_max, grid.points);
  double best = -std::numeric_limits<double>::infinity();
  std::size_t best_l = 0;
  std::size_t best_v = 0;
  bool found = false;
  for (std::size_t i = 0; i < lengthscales.size(); ++i) {
    for (std::size_t j = 0; j < variances.size(); ++j) {
      const double value = objective(lengthscales[i], variances[j]);
      if (!std::isfinite(value)) continue;
      // Lengthscales are visited in increasing order, so >= across rows prefers larger lambda.
      const bool better = !found || value > best || (value == best && i > best_l);
      if (better) {
        best = value;
        best_l = i;
        best_v = j;
        found = true;
      }
    }
  }
  if (!found) {
    throw IllConditionedKernel("fit_hyperparameters: kernel matrix factorization failed at every grid point",
                               std::numeric_limits<double>::quiet_NaN());
  }

  double lengthscale = lengthscales[best_l];
  double variance = variances[best_v];
  auto bracket = [](const std::vector<double>& axis, std::size_t i) {
    const double lo = axis[i == 0 ? 0 : i - 1];
    const double hi = axis[std::min(i + 1, axis.size() - 1)];
    return std::pair{std::log(lo), std::log(hi)};
  };

  if (lengthscales.size() > 1) {
    const auto [lo, hi] = bracket(lengthscales, best_l);
    const auto [x, fx] = golden_max([&](double t) { return objective(std::exp(t), variance); }, lo, hi);
    if (fx > best) {
      best = fx;
      lengthscale = std::exp(x);
    }
  }
  if (variances.size() > 1) {
    const auto [lo, hi] = bracket(variances, best_v);
    const auto [x, fx] = golden_max([&](double t) { return objective(lengthscale, std::exp(t)); }, lo, hi);
    if (fx > best) {
      best = fx;
      variance = std::exp(x);
    }
  }
  return KernelSpec(family, lengthscale, variance);
}

double rkhs_norm(const KernelSpec& kernel, const PointSet& centers, const Eigen::VectorXd& coefficients) {
  if (static_cast<std::size_t>(coefficients.size()) != centers.size()) {
    throw InvalidArgument("rkhs_norm: " + std::to_string(coefficients.size()) + " coefficients for " +
                          std::to_string(centers.size()) + " centers");
  }
  if (centers.empty()) return 0.0;
  const double q = coefficients.dot(kernel_matrix(kernel, centers) * coefficients);
  return std::sqrt(std::max(q, 0.0));
}

}  // namespace gpbayes
