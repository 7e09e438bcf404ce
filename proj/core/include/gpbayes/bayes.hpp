#pragma once

#include "gpbayes/darcy.hpp"
#include "gpbayes/quadrature.hpp"
#include "gpbayes/random.hpp"
#include "gpbayes/types.hpp"

#include <atomic>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>

namespace gpbayes {

// ---------------------------------------------------------------------------
// Forward models G : R^{d_u} -> R^{d_y}
// ---------------------------------------------------------------------------

/// Deterministic forward map with an evaluation counter for cost accounting.
/// Evaluation is safe to call concurrently.
class ForwardModel {
 public:
  ForwardModel(int input_dim, int output_dim, std::string name);
  virtual ~ForwardModel() = default;
  ForwardModel(const ForwardModel&) = delete;
  ForwardModel& operator=(const ForwardModel&) = delete;

  /// G(u); throws InvalidArgument if u has the wrong dimension.
  [[nodiscard]] Eigen::VectorXd evaluate(const Point& u) const;

  [[nodiscard]] int input_dim() const noexcept { return input_dim_; }
  [[nodiscard]] int output_dim() const noexcept { return output_dim_; }
  [[nodiscard]] const std::string& name() const noexcept { return name_; }
  [[nodiscard]] std::uint64_t evaluation_count() const noexcept { return count_.load(); }
  void reset_evaluation_count() const noexcept { count_.store(0); }

 protected:
  [[nodiscard]] virtual Eigen::VectorXd compute(const Point& u) const = 0;

 private:
  int input_dim_;
  int output_dim_;
  std::string name_;
  mutable std::atomic<std::uint64_t> count_{0};
};

/// G(u) = u.
class IdentityForward final : public ForwardModel {
 public:
  explicit IdentityForward(int dim);

 protected:
  [[nodiscard]] Eigen::VectorXd compute(const Point& u) const override;
};

/// Closed-form map given as a callable, e.g. f(x) = sin((x - 2.5)^2).
class FunctionForward final : public ForwardModel {
 public:
  using Map = std::function<Eigen::VectorXd(const Point&)>;
  FunctionForward(int input_dim, int output_dim, Map map, std::string name);

  /// Scalar function of a scalar input.
  static std::shared_ptr<FunctionForward> scalar(std::function<double(double)> f, std::string name);

 protected:
  [[nodiscard]] Eigen::VectorXd compute(const Point& u) const override;

 private:
  Map map_;
};

/// Layered-permeability Darcy problem observed through pressure values.
class DarcyForward final : public ForwardModel {
 public:
  explicit DarcyForward(DarcyModel model);
  [[nodiscard]] const DarcyModel& model() const noexcept { return model_; }

 protected:
  [[nodiscard]] Eigen::VectorXd compute(const Point& u) const override;

 private:
  DarcyModel model_;
};

// ---------------------------------------------------------------------------
// Noise, prior, problem
// ---------------------------------------------------------------------------

/// Gaussian observation noise N(0, Gamma) with a cached Cholesky factor.
class NoiseModel {
 public:
  /// Throws InvalidArgument unless Gamma is square, symmetric and positive definite.
  explicit NoiseModel(Eigen::MatrixXd covariance);
  static NoiseModel diagonal(const Eigen::VectorXd& variances);

  [[nodiscard]] int dim() const noexcept { return static_cast<int>(covariance_.rows()); }
  [[nodiscard]] const Eigen::MatrixXd& covariance() const noexcept { return covariance_; }
  [[nodiscard]] const Eigen::MatrixXd& cholesky() const noexcept { return chol_; }

  /// ||v||_Gamma^2 = v^T Gamma^{-1} v, via the Cholesky factor.
  [[nodiscard]] double squared_norm(const Eigen::VectorXd& v) const;
  [[nodiscard]] double log_det() const noexcept { return log_det_; }
  /// Gamma^{1/2} xi with the Cholesky factor as square root.
  [[nodiscard]] Eigen::VectorXd correlate(const Eigen::VectorXd& xi) const;

 private:
  Eigen::MatrixXd covariance_;
  Eigen::MatrixXd chol_;
  double log_det_ = 0.0;
};

struct GaussianDiagPrior {
  Eigen::VectorXd means;
  Eigen::VectorXd variances;
};
struct UniformBoxPrior {
  Box box;
};
/// log u_j ~ N(log_means_j, log_variances_j) independently.
struct LogNormalDiagPrior {
  Eigen::VectorXd log_means;
  Eigen::VectorXd log_variances;
};

/// Prior measure mu_0 with density pi_0 and an i.i.d. sampler.
class Prior {
 public:
  using Variant = std::variant<GaussianDiagPrior, UniformBoxPrior, LogNormalDiagPrior>;

  static Prior gaussian(Eigen::VectorXd means, Eigen::VectorXd variances);
  static Prior uniform(Box box);
  static Prior lognormal(Eigen::VectorXd log_means, Eigen::VectorXd log_variances);

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] const Variant& variant() const noexcept { return variant_; }

  /// log pi_0(u); -infinity outside the support.
  [[nodiscard]] double log_density(const Point& u) const;
  [[nodiscard]] double density(const Point& u) const;
  [[nodiscard]] Point sample(Rng& rng) const;

  /// Box carrying all but a negligible part of the mass: mean +- 8 sd for Gaussian,
  /// the box itself for uniform, exp(log-mean +- 8 log-sd) for log-normal.
  [[nodiscard]] Box effective_support() const;

 private:
  Prior(Variant v, int dim) : variant_(std::move(v)), dim_(dim) {}
  Variant variant_;
  int dim_;
};

/// Half-width of the Gaussian effective support in standard deviations.
inline constexpr double kSupportSigmas = 8.0;

/// y = G(u) + eta, eta ~ N(0, Gamma), u ~ mu_0.
class BayesProblem {
 public:
  /// Throws InvalidArgument if dimensions disagree. The quadrature domain defaults to
  /// the prior's effective support.
  BayesProblem(std::shared_ptr<const ForwardModel> forward, Eigen::VectorXd data, NoiseModel noise, Prior prior,
               std::optional<Box> domain = std::nullopt);

  [[nodiscard]] const ForwardModel& forward() const noexcept { return *forward_; }
  [[nodiscard]] const std::shared_ptr<const ForwardModel>& forward_ptr() const noexcept { return forward_; }
  [[nodiscard]] const Eigen::VectorXd& data() const noexcept { return data_; }
  [[nodiscard]] const NoiseModel& noise() const noexcept { return noise_; }
  [[nodiscard]] const Prior& prior() const noexcept { return prior_; }
  [[nodiscard]] const Box& domain() const noexcept { return domain_; }
  [[nodiscard]] int parameter_dim() const noexcept { return prior_.dim(); }
  [[nodiscard]] int data_dim() const noexcept { return static_cast<int>(data_.size()); }

 private:
  std::shared_ptr<const ForwardModel> forward_;
  Eigen::VectorXd data_;
  NoiseModel noise_;
  Prior prior_;
  Box domain_;
};

/// y = G(u_true) + Gamma^{1/2} xi with xi drawn from `noise_seed`.
Eigen::VectorXd synthesize_data(const ForwardModel& forward, const NoiseModel& noise, const Point& true_u,
                                std::uint64_t noise_seed);

/// Phi(u) = 1/2 ||y - G(u)||_Gamma^2.
double neg_log_likelihood(const BayesProblem& problem, const Point& u);

// ---------------------------------------------------------------------------
// Evidence
// ---------------------------------------------------------------------------

/// Composite trapezoid over the problem domain; nodes_per_dim = 0 picks the defaults.
struct QuadratureMethod {
  std::size_t nodes_per_dim = 0;
};
/// Plain Monte Carlo with prior samples.
struct MonteCarloMethod {
  std::size_t samples = 100000;
  std::uint64_t seed = 0;
};
using EvidenceMethod = std::variant<QuadratureMethod, MonteCarloMethod>;

/// Normalizing constant Z = E_{mu_0}[exp(-Phi)] together with how it was obtained.
struct EvidenceEstimate {
  double value = 0.0;      // Z
  double log_value = 0.0;  // log Z
  /// log of the marginal density of the data, log Z - d_y/2 log(2 pi) - 1/2 log det Gamma.
  double log_data_density = 0.0;
  std::string method;        // "quadrature" or "monte-carlo"
  std::size_t evaluations = 0;  // quadrature nodes or MC samples
  double std_error = 0.0;       // MC standard error of `value`; 0 for quadrature

  [[nodiscard]] double data_density() const;
};

/// Smallest Z accepted before reporting underflow.
inline constexpr double kEvidenceFloor = 1e-300;

/// Integrates exp(log_likelihood) against the prior. Shared by the true posterior and
/// the surrogate posteriors. Quadrature requires d_u <= 2.
/// Throws UnderflowError when Z < 1e-300.
EvidenceEstimate integrate_likelihood(const std::function<double(const Point&)>& log_likelihood,
                                      const Prior& prior, const Box& domain, const EvidenceMethod& method,
                                      double log_likelihood_normalizer = 0.0);

EvidenceEstimate evidence(const BayesProblem& problem, const EvidenceMethod& method = QuadratureMethod{});

/// log pi^y(u) = log pi_0(u) - Phi(u) - log Z; -infinity outside the prior support.
double posterior_log_density(const BayesProblem& problem, const Point& u, double evidence_value);

/// -d_y/2 log(2 pi) - 1/2 log det Gamma: log of the Gaussian likelihood's normalizer.
double log_likelihood_normalizer(const NoiseModel& noise);

}  // namespace gpbayes
