#include "gpbayes/surrogate.hpp"

#include "gpbayes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

namespace gpbayes {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

std::string_view to_string(SurrogateKind kind) {
  switch (kind) {
    case SurrogateKind::MeanBased: return "mean";
    case SurrogateKind::Marginal: return "marginal";
    case SurrogateKind::SampleBased: return "sample";
  }
  return "unknown";
}

SurrogateKind parse_surrogate_kind(std::string_view name) {
  if (name == "mean") return SurrogateKind::MeanBased;
  if (name == "marginal") return SurrogateKind::Marginal;
  if (name == "sample") return SurrogateKind::SampleBased;
  throw InvalidArgument("unknown surrogate kind '" + std::string(name) + "' (expected mean, marginal or sample)");
}

SurrogatePosterior::SurrogatePosterior(SurrogateKind kind, SurrogateTarget target, BayesProblem problem,
                                       SampleOptions sample)
    : kind_(kind), target_(std::move(target)), problem_(std::move(problem)) {
  const int du = problem_.parameter_dim();
  if (const auto* phi = std::get_if<EmulatePhi>(&target_)) {
    if (phi->gp.dim() != du) throw InvalidArgument("SurrogatePosterior: Phi emulator dimension mismatch");
  } else {
    const auto& g = std::get<EmulateG>(target_);
    if (static_cast<int>(g.outputs.size()) != problem_.data_dim()) {
      throw InvalidArgument("SurrogatePosterior: need one emulator per data component");
    }
    for (const auto& gp : g.outputs) {
      if (gp.dim() != du) throw InvalidArgument("SurrogatePosterior: G emulator dimension mismatch");
    }
  }
  if (kind_ != SurrogateKind::SampleBased) return;

  const auto* phi = std::get_if<EmulatePhi>(&target_);
  if (phi == nullptr) throw InvalidArgument("SurrogatePosterior: the sample-based kind needs a Phi emulator");
  if (du != 1) throw InvalidArgument("SurrogatePosterior: the sample-based kind is implemented for d_u = 1");
  if (sample.grid_nodes < 2) throw InvalidArgument("SurrogatePosterior: path grid needs at least 2 nodes");
  const Box box = sample.grid_box ? *sample.grid_box : problem_.domain();
  if (box.dim() != 1) throw InvalidArgument("SurrogatePosterior: path grid box must be 1-D");
  const PointSet grid = linspace1(box.lower[0], box.upper[0], sample.grid_nodes);
  path_grid_.reserve(grid.size());
  for (const auto& p : grid) path_grid_.push_back(p[0]);
  path_values_ = sample_path_on_grid(phi->gp, grid, sample.seed);
}

double SurrogatePosterior::log_likelihood(const Point& u) const {
  if (kind_ == SurrogateKind::SampleBased) {
    const double x = u[0];
    const double lo = path_grid_.front();
    const double hi = path_grid_.back();
    if (!(x >= lo && x <= hi)) {
      std::ostringstream os;
      os << "sample-based surrogate queried at u = " << x << " outside its path grid [" << lo << ", " << hi << "]";
      throw ExtrapolationError(os.str());
    }
    auto it = std::upper_bound(path_grid_.begin(), path_grid_.end(), x);
    std::size_t j = static_cast<std::size_t>(it - path_grid_.begin());
    j = std::clamp<std::size_t>(j, 1, path_grid_.size() - 1);
    const double x0 = path_grid_[j - 1];
    const double x1 = path_grid_[j];
    const double t = (x - x0) / (x1 - x0);
    return -((1.0 - t) * path_values_[static_cast<Eigen::Index>(j - 1)] + t * path_values_[static_cast<Eigen::Index>(j)]);
  }

  if (const auto* phi = std::get_if<EmulatePhi>(&target_)) {
    const double m = phi->gp.predict_mean(u);
    if (kind_ == SurrogateKind::MeanBased) return -m;
    return -m + 0.5 * phi->gp.predict_var(u);
  }

  const auto& g = std::get<EmulateG>(target_);
  const int dy = problem_.data_dim();
  Eigen::VectorXd r(dy);
  for (int j = 0; j < dy; ++j) r[j] = problem_.data()[j] - g.outputs[static_cast<std::size_t>(j)].predict_mean(u);
  if (kind_ == SurrogateKind::MeanBased) return -0.5 * problem_.noise().squared_norm(r);

  Eigen::MatrixXd cov = problem_.noise().covariance();
  for (int j = 0; j < dy; ++j) cov(j, j) += g.outputs[static_cast<std::size_t>(j)].predict_var(u);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success) throw NumericalError("marginal surrogate: Gamma + K_N(u,u) is not positive definite");
  const Eigen::MatrixXd l = llt.matrixL();
  const double log_det_inflated = 2.0 * l.diagonal().array().log().sum();
  const double quad = l.triangularView<Eigen::Lower>().solve(r).squaredNorm();
  return -0.5 * (log_det_inflated - problem_.noise().log_det()) - 0.5 * quad;
}

double SurrogatePosterior::unnormalized_log_density(const Point& u) const {
  const double lp = problem_.prior().log_density(u);
  if (lp == kNegInf) return kNegInf;
  return lp + log_likelihood(u);
}

SurrogatePosterior SurrogatePosterior::normalize(const EvidenceMethod& method) const {
  SurrogatePosterior out = *this;
  out.evidence_ = integrate_likelihood([this](const Point& u) { return log_likelihood(u); }, problem_.prior(),
                                       problem_.domain(), method, log_likelihood_normalizer(problem_.noise()));
  return out;
}

const EvidenceEstimate& SurrogatePosterior::evidence() const {
  if (!evidence_) throw std::logic_error("SurrogatePosterior: call normalize() first");
  return *evidence_;
}

double SurrogatePosterior::log_density(const Point& u) const {
  const double lu = unnormalized_log_density(u);
  if (lu == kNegInf) return kNegInf;
  return lu - evidence().log_value;
}

double SurrogatePosterior::density(const Point& u) const { return std::exp(log_density(u)); }

EmulatePhi train_phi_emulator(const BayesProblem& problem, const Design& design, const KernelSpec& kernel,
                              const MeanFunction& mean) {
  Observations obs(static_cast<Eigen::Index>(design.size()));
  for (std::size_t i = 0; i < design.size(); ++i) {
    obs[static_cast<Eigen::Index>(i)] = neg_log_likelihood(problem, design[i]);
  }
  return EmulatePhi{GPPosterior::fit(GPPrior{mean, kernel}, design, std::move(obs), 0.0)};
}

EmulateG train_forward_emulator(const BayesProblem& problem, const Design& design, const KernelSpec& kernel,
                                const MeanFunction& mean) {
  const int dy = problem.data_dim();
  Eigen::MatrixXd values(static_cast<Eigen::Index>(design.size()), dy);
  for (std::size_t i = 0; i < design.size(); ++i) {
    values.row(static_cast<Eigen::Index>(i)) = problem.forward().evaluate(design[i]).transpose();
  }
  EmulateG out;
  out.outputs.reserve(static_cast<std::size_t>(dy));
  for (int j = 0; j < dy; ++j) {
    out.outputs.push_back(GPPosterior::fit(GPPrior{mean, kernel}, design, values.col(j), 0.0));
  }
  return out;
}

MonteCarloEstimate lognormal_expectation_mc(double m, double k, std::size_t draws, std::uint64_t seed) {
  if (k < 0.0) throw InvalidArgument("lognormal_expectation_mc: variance must be non-negative");
  if (draws < 2) throw InvalidArgument("lognormal_expectation_mc: need at least 2 draws");
  Rng rng = make_rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sd = std::sqrt(k);
  double mean = 0.0;
  double m2 = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    const double v = std::exp(-(m + sd * normal(rng)));
    const double delta = v - mean;
    mean += delta / static_cast<double>(i + 1);
    m2 += delta * (v - mean);
  }
  const double n = static_cast<double>(draws);
  return {mean, std::sqrt(m2 / (n - 1.0) / n)};
}

MonteCarloEstimate monte_carlo_marginal_check(const SurrogatePosterior& s, const Point& u, std::size_t draws,
                                              std::uint64_t seed) {
  const auto* phi = std::get_if<EmulatePhi>(&s.target());
  if (phi == nullptr) throw InvalidArgument("monte_carlo_marginal_check: needs a Phi emulator");
  return lognormal_expectation_mc(phi->gp.predict_mean(u), phi->gp.predict_var(u), draws, seed);
}

}  // namespace gpbayes
