#include "gpbayes/bayes.hpp"

#include "gpbayes/errors.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

namespace gpbayes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_dim(const Point& u, int dim, const char* what) {
  if (u.size() != dim) {
    std::ostringstream os;
    os << what << ": expected a point in R^" << dim << ", got dimension " << u.size();
    throw InvalidArgument(os.str());
  }
}

}  // namespace

// --- forward models ---------------------------------------------------------

ForwardModel::ForwardModel(int input_dim, int output_dim, std::string name)
    : input_dim_(input_dim), output_dim_(output_dim), name_(std::move(name)) {
  if (input_dim < 1 || output_dim < 1) throw InvalidArgument("ForwardModel: dimensions must be positive");
}

Eigen::VectorXd ForwardModel::evaluate(const Point& u) const {
  check_dim(u, input_dim_, "ForwardModel::evaluate");
  count_.fetch_add(1, std::memory_order_relaxed);
  Eigen::VectorXd out = compute(u);
  if (out.size() != output_dim_) throw NumericalError("ForwardModel '" + name_ + "' returned the wrong output size");
  return out;
}

IdentityForward::IdentityForward(int dim) : ForwardModel(dim, dim, "identity") {}

Eigen::VectorXd IdentityForward::compute(const Point& u) const { return u; }

FunctionForward::FunctionForward(int input_dim, int output_dim, Map map, std::string name)
    : ForwardModel(input_dim, output_dim, std::move(name)), map_(std::move(map)) {
  if (!map_) throw InvalidArgument("FunctionForward: empty map");
}

std::shared_ptr<FunctionForward> FunctionForward::scalar(std::function<double(double)> f, std::string name) {
  if (!f) throw InvalidArgument("FunctionForward::scalar: empty function");
  return std::make_shared<FunctionForward>(
      1, 1, [f = std::move(f)](const Point& u) { return Eigen::VectorXd::Constant(1, f(u[0])); }, std::move(name));
}

Eigen::VectorXd FunctionForward::compute(const Point& u) const { return map_(u); }

DarcyForward::DarcyForward(DarcyModel model)
    : ForwardModel(static_cast<int>(model.parameter_dim()), static_cast<int>(model.observation_dim()), "darcy1d"),
      model_(std::move(model)) {
  model_.validate();
}

Eigen::VectorXd DarcyForward::compute(const Point& u) const { return solve_darcy(model_, u).observations; }

// --- noise ------------------------------------------------------------------

NoiseModel::NoiseModel(Eigen::MatrixXd covariance) : covariance_(std::move(covariance)) {
  if (covariance_.rows() == 0 || covariance_.rows() != covariance_.cols()) {
    throw InvalidArgument("NoiseModel: covariance must be a non-empty square matrix");
  }
  const double scale = covariance_.cwiseAbs().maxCoeff();
  if (!(covariance_ - covariance_.transpose()).isZero(1e-12 * scale)) {
    throw InvalidArgument("NoiseModel: covariance must be symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(covariance_);
  if (llt.info() != Eigen::Success) throw InvalidArgument("NoiseModel: covariance must be positive definite");
  chol_ = llt.matrixL();
  log_det_ = 2.0 * chol_.diagonal().array().log().sum();
}

NoiseModel NoiseModel::diagonal(const Eigen::VectorXd& variances) {
  return NoiseModel(Eigen::MatrixXd(variances.asDiagonal()));
}

double NoiseModel::squared_norm(const Eigen::VectorXd& v) const {
  if (v.size() != covariance_.rows()) throw InvalidArgument("NoiseModel::squared_norm: dimension mismatch");
  return chol_.triangularView<Eigen::Lower>().solve(v).squaredNorm();
}

Eigen::VectorXd NoiseModel::correlate(const Eigen::VectorXd& xi) const {
  if (xi.size() != covariance_.rows()) throw InvalidArgument("NoiseModel::correlate: dimension mismatch");
  return chol_.triangularView<Eigen::Lower>() * xi;
}

double log_likelihood_normalizer(const NoiseModel& noise) {
  return -0.5 * noise.dim() * std::log(2.0 * std::numbers::pi) - 0.5 * noise.log_det();
}

// --- prior ------------------------------------------------------------------

Prior Prior::gaussian(Eigen::VectorXd means, Eigen::VectorXd variances) {
  if (means.size() == 0 || means.size() != variances.size()) {
    throw InvalidArgument("Prior::gaussian: means and variances must be non-empty and of equal length");
  }
  if (!(variances.array() > 0.0).all()) throw InvalidArgument("Prior::gaussian: variances must be positive");
  const int d = static_cast<int>(means.size());
  return Prior(GaussianDiagPrior{std::move(means), std::move(variances)}, d);
}

Prior Prior::uniform(Box box) {
  const int d = box.dim();
  if (d == 0) throw InvalidArgument("Prior::uniform: empty box");
  return Prior(UniformBoxPrior{std::move(box)}, d);
}

Prior Prior::lognormal(Eigen::VectorXd log_means, Eigen::VectorXd log_variances) {
  if (log_means.size() == 0 || log_means.size() != log_variances.size()) {
    throw InvalidArgument("Prior::lognormal: parameters must be non-empty and of equal length");
  }
  if (!(log_variances.array() > 0.0).all()) throw InvalidArgument("Prior::lognormal: variances must be positive");
  const int d = static_cast<int>(log_means.size());
  return Prior(LogNormalDiagPrior{std::move(log_means), std::move(log_variances)}, d);
}

double Prior::log_density(const Point& u) const {
  check_dim(u, dim_, "Prior::log_density");
  constexpr double half_log_2pi = 0.91893853320467274178;
  return std::visit(
      [&](const auto& p) -> double {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GaussianDiagPrior>) {
          double acc = 0.0;
          for (int j = 0; j < dim_; ++j) {
            const double z = u[j] - p.means[j];
            acc += -0.5 * z * z / p.variances[j] - 0.5 * std::log(p.variances[j]) - half_log_2pi;
          }
          return acc;
        } else if constexpr (std::is_same_v<T, UniformBoxPrior>) {
          return p.box.contains(u) ? -std::log(p.box.volume()) : kNegInf;
        } else {
          double acc = 0.0;
          for (int j = 0; j < dim_; ++j) {
            if (!(u[j] > 0.0)) return kNegInf;
            const double lu = std::log(u[j]);
            const double z = lu - p.log_means[j];
            acc += -0.5 * z * z / p.log_variances[j] - 0.5 * std::log(p.log_variances[j]) - half_log_2pi - lu;
          }
          return acc;
        }
      },
      variant_);
}

double Prior::density(const Point& u) const { return std::exp(log_density(u)); }

Point Prior::sample(Rng& rng) const {
  Point u(dim_);
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GaussianDiagPrior>) {
          std::normal_distribution<double> normal(0.0, 1.0);
          for (int j = 0; j < dim_; ++j) u[j] = p.means[j] + std::sqrt(p.variances[j]) * normal(rng);
        } else if constexpr (std::is_same_v<T, UniformBoxPrior>) {
          std::uniform_real_distribution<double> unif(0.0, 1.0);
          for (int j = 0; j < dim_; ++j) u[j] = p.box.lower[j] + (p.box.upper[j] - p.box.lower[j]) * unif(rng);
        } else {
          std::normal_distribution<double> normal(0.0, 1.0);
          for (int j = 0; j < dim_; ++j) u[j] = std::exp(p.log_means[j] + std::sqrt(p.log_variances[j]) * normal(rng));
        }
      },
      variant_);
  return u;
}

Box Prior::effective_support() const {
  return std::visit(
      [&](const auto& p) -> Box {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GaussianDiagPrior>) {
          const Eigen::VectorXd sd = p.variances.array().sqrt();
          return Box(p.means - kSupportSigmas * sd, p.means + kSupportSigmas * sd);
        } else if constexpr (std::is_same_v<T, UniformBoxPrior>) {
          return p.box;
        } else {
          const Eigen::VectorXd sd = p.log_variances.array().sqrt();
          return Box((p.log_means - kSupportSigmas * sd).array().exp().matrix(),
                     (p.log_means + kSupportSigmas * sd).array().exp().matrix());
        }
      },
      variant_);
}

// --- problem ----------------------------------------------------------------

BayesProblem::BayesProblem(std::shared_ptr<const ForwardModel> forward, Eigen::VectorXd data, NoiseModel noise,
                           Prior prior, std::optional<Box> domain)
    : forward_(std::move(forward)), data_(std::move(data)), noise_(std::move(noise)), prior_(std::move(prior)) {
  if (!forward_) throw InvalidArgument("BayesProblem: forward model is null");
  if (forward_->input_dim() != prior_.dim()) {
    throw InvalidArgument("BayesProblem: prior dimension does not match the forward model input");
  }
  if (data_.size() != forward_->output_dim()) {
    throw InvalidArgument("BayesProblem: data length " + std::to_string(data_.size()) +
                          " does not match forward output dimension " + std::to_string(forward_->output_dim()));
  }
  if (noise_.dim() != data_.size()) throw InvalidArgument("BayesProblem: noise covariance does not match data length");
  domain_ = domain ? std::move(*domain) : prior_.effective_support();
  if (domain_.dim() != prior_.dim()) throw InvalidArgument("BayesProblem: domain box has the wrong dimension");
}

Eigen::VectorXd synthesize_data(const ForwardModel& forward, const NoiseModel& noise, const Point& true_u,
                                std::uint64_t noise_seed) {
  Rng rng = make_rng(noise_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Eigen::VectorXd xi(noise.dim());
  for (Eigen::Index i = 0; i < xi.size(); ++i) xi[i] = normal(rng);
  return forward.evaluate(true_u) + noise.correlate(xi);
}

double neg_log_likelihood(const BayesProblem& problem, const Point& u) {
  const Eigen::VectorXd r = problem.data() - problem.forward().evaluate(u);
  return 0.5 * problem.noise().squared_norm(r);
}

// --- evidence ---------------------------------------------------------------

double EvidenceEstimate::data_density() const { return std::exp(log_data_density); }

EvidenceEstimate integrate_likelihood(const std::function<double(const Point&)>& log_likelihood, const Prior& prior,
                                      const Box& domain, const EvidenceMethod& method,
                                      double log_likelihood_normalizer) {
  EvidenceEstimate est;
  if (const auto* q = std::get_if<QuadratureMethod>(&method)) {
    if (prior.dim() > 2) throw InvalidArgument("evidence: quadrature is limited to d_u <= 2; use Monte Carlo");
    const QuadratureGrid grid = trapezoid_grid(domain, q->nodes_per_dim);
    std::vector<double> log_terms(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const double lp = prior.log_density(grid.nodes[i]);
      log_terms[i] = lp == kNegInf ? kNegInf : lp + log_likelihood(grid.nodes[i]);
    }
    est.log_value = log_weighted_sum_exp(log_terms, grid.weights);
    est.method = "quadrature";
    est.evaluations = grid.size();
  } else {
    const auto& mc = std::get<MonteCarloMethod>(method);
    if (mc.samples < 2) throw InvalidArgument("evidence: Monte Carlo needs at least 2 samples");
    Rng rng = make_rng(mc.seed);
    std::vector<double> log_terms(mc.samples);
    for (auto& lt : log_terms) lt = log_likelihood(prior.sample(rng));
    const double log_sum = log_sum_exp(log_terms);
    const double n = static_cast<double>(mc.samples);
    est.log_value = log_sum - std::log(n);
    if (std::isfinite(est.log_value)) {
      // Standard error in units of the max term, then rescaled.
      double sum_sq = 0.0;
      for (double lt : log_terms) {
        const double ratio = std::exp(lt - est.log_value);
        sum_sq += (ratio - 1.0) * (ratio - 1.0);
      }
      est.std_error = std::exp(est.log_value) * std::sqrt(sum_sq / (n - 1.0) / n);
    }
    est.method = "monte-carlo";
    est.evaluations = mc.samples;
  }
  if (!(est.log_value >= std::log(kEvidenceFloor))) {
    std::ostringstream os;
    os << "evidence underflow: log Z = " << est.log_value
       << " is below log(1e-300); inspect the log-likelihood on the domain (poor fit or wrong domain?)";
    throw UnderflowError(os.str());
  }
  est.value = std::exp(est.log_value);
  est.log_data_density = est.log_value + log_likelihood_normalizer;
  return est;
}

EvidenceEstimate evidence(const BayesProblem& problem, const EvidenceMethod& method) {
  return integrate_likelihood([&](const Point& u) { return -neg_log_likelihood(problem, u); }, problem.prior(),
                              problem.domain(), method, log_likelihood_normalizer(problem.noise()));
}

double posterior_log_density(const BayesProblem& problem, const Point& u, double evidence_value) {
  if (!(evidence_value > 0.0)) throw InvalidArgument("posterior_log_density: evidence must be positive");
  const double lp = problem.prior().log_density(u);
  if (lp == kNegInf) return kNegInf;
  return lp - neg_log_likelihood(problem, u) - std::log(evidence_value);
}

}  // namespace gpbayes
