#include "gpbayes/mcmc.hpp"

#include "gpbayes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace gpbayes {

namespace {

std::string format_point(const Point& u) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (Eigen::Index i = 0; i < u.size(); ++i) os << (i ? ", " : "") << u[i];
  os << ')';
  return os.str();
}

double checked(const LogDensity& f, const Point& u) {
  const double v = f(u);
  if (std::isnan(v)) throw NumericalError("log target returned NaN at u = " + format_point(u));
  return v;
}

// Lags beyond this are not inspected; the estimate then underreports very slow mixing.
constexpr std::size_t kMaxAutocorrelationLag = 20000;

}  // namespace

Proposal random_walk_proposal(double step) {
  if (!(step > 0.0) || !std::isfinite(step)) throw InvalidArgument("random_walk_proposal: step must be positive");
  Proposal p;
  p.draw = [step](const Point& u, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Point v = u;
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += step * normal(rng);
    return v;
  };
  p.symmetric = true;
  p.step = Eigen::VectorXd::Constant(1, step);
  return p;
}

Proposal random_walk_proposal(Eigen::VectorXd step) {
  if (step.size() == 0) throw InvalidArgument("random_walk_proposal: empty step vector");
  for (Eigen::Index i = 0; i < step.size(); ++i) {
    if (!(step[i] > 0.0) || !std::isfinite(step[i])) {
      throw InvalidArgument("random_walk_proposal: step entries must be positive");
    }
  }
  Proposal p;
  p.draw = [step](const Point& u, Rng& rng) {
    if (u.size() != step.size()) {
      throw InvalidArgument("random_walk_proposal: step vector has length " + std::to_string(step.size()) +
                            " but the state has dimension " + std::to_string(u.size()));
    }
    std::normal_distribution<double> normal(0.0, 1.0);
    Point v = u;
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += step[i] * normal(rng);
    return v;
  };
  p.symmetric = true;
  p.step = std::move(step);
  return p;
}

Chain metropolis_hastings(const LogDensity& log_target, const Proposal& proposal, const Point& init, std::size_t n,
                          std::uint64_t seed) {
  if (n == 0) throw InvalidArgument("metropolis_hastings: chain length must be positive");
  if (!proposal.draw) throw InvalidArgument("metropolis_hastings: proposal has no sampler");
  if (!proposal.symmetric && !proposal.log_density) {
    throw InvalidArgument("metropolis_hastings: asymmetric proposal needs log_density");
  }
  if (proposal.step.size() > 1 && proposal.step.size() != init.size()) {
    throw InvalidArgument("metropolis_hastings: step vector length does not match the state dimension");
  }
  double current_lp = checked(log_target, init);
  if (current_lp == -std::numeric_limits<double>::infinity()) {
    throw InvalidArgument("metropolis_hastings: initial state " + format_point(init) + " has zero target density");
  }

  Chain chain;
  chain.seed = seed;
  chain.step = proposal.step;
  chain.samples.reserve(n);
  chain.log_densities.reserve(n);
  chain.accepted.reserve(n);
  chain.proposal_log_densities.reserve(n);
  chain.samples.push_back(init);
  chain.log_densities.push_back(current_lp);
  chain.accepted.push_back(true);
  chain.proposal_log_densities.push_back(current_lp);

  Rng rng = make_rng(seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Point current = init;
  for (std::size_t i = 1; i < n; ++i) {
    Point cand = proposal.draw(current, rng);
    const double cand_lp = checked(log_target, cand);
    double log_alpha = cand_lp - current_lp;
    if (!proposal.symmetric) log_alpha += proposal.log_density(current, cand) - proposal.log_density(cand, current);
    const double log_u = std::log(unif(rng));
    const bool accept = log_u < log_alpha;
    chain.proposal_log_densities.push_back(cand_lp);
    if (accept) {
      current = std::move(cand);
      current_lp = cand_lp;
    }
    chain.samples.push_back(current);
    chain.log_densities.push_back(current_lp);
    chain.accepted.push_back(accept);
  }
  return chain;
}

std::size_t default_burn_in(std::size_t n) { return n / 5; }

double default_step(int dim) {
  if (dim < 1) throw InvalidArgument("default_step: dimension must be positive");
  return 2.4 / std::sqrt(static_cast<double>(dim));
}

double integrated_autocorrelation_time(const std::vector<double>& xs) {
  const std::size_t n = xs.size();
  if (n < 2) return 1.0;
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(n);
  auto autocov = [&](std::size_t lag) {
    double acc = 0.0;
    for (std::size_t t = 0; t + lag < n; ++t) acc += (xs[t] - mean) * (xs[t + lag] - mean);
    return acc / static_cast<double>(n);
  };
  const double c0 = autocov(0);
  if (!(c0 > 0.0)) return 1.0;
  // Geyer: sum pairs Gamma_m = rho_{2m} + rho_{2m+1} while they stay positive.
  double sum_pairs = 0.0;
  const std::size_t max_lag = std::min<std::size_t>(n - 1, kMaxAutocorrelationLag);
  for (std::size_t m = 0; 2 * m + 1 <= max_lag; ++m) {
    const double pair = (autocov(2 * m) + autocov(2 * m + 1)) / c0;
    if (!(pair > 0.0)) break;
    sum_pairs += pair;
  }
  // tau = -1 + 2 sum_m Gamma_m (since rho_0 = 1 is counted once).
  return std::max(-1.0 + 2.0 * sum_pairs, 0.0);
}

ChainDiagnostics chain_diagnostics(const Chain& chain, std::size_t burn_in) {
  if (burn_in >= chain.size()) throw InvalidArgument("chain_diagnostics: burn-in leaves no samples");
  const std::size_t kept = chain.size() - burn_in;
  const Eigen::Index d = chain.samples.front().size();
  ChainDiagnostics diag;
  diag.burn_in = burn_in;
  diag.kept = kept;

  std::size_t steps = 0;
  std::size_t accepts = 0;
  for (std::size_t i = std::max<std::size_t>(burn_in, 1); i < chain.size(); ++i) {
    ++steps;
    if (chain.accepted[i]) ++accepts;
  }
  diag.acceptance_rate = steps == 0 ? 1.0 : static_cast<double>(accepts) / static_cast<double>(steps);

  diag.mean = Eigen::VectorXd::Zero(d);
  for (std::size_t i = burn_in; i < chain.size(); ++i) diag.mean += chain.samples[i];
  diag.mean /= static_cast<double>(kept);
  diag.variance = Eigen::VectorXd::Zero(d);
  for (std::size_t i = burn_in; i < chain.size(); ++i) {
    diag.variance += (chain.samples[i] - diag.mean).array().square().matrix();
  }
  diag.variance /= kept > 1 ? static_cast<double>(kept - 1) : 1.0;

  diag.iact.resize(d);
  std::vector<double> series(kept);
  for (Eigen::Index j = 0; j < d; ++j) {
    for (std::size_t i = 0; i < kept; ++i) series[i] = chain.samples[burn_in + i][j];
    diag.iact[j] = integrated_autocorrelation_time(series);
  }
  return diag;
}

}  // namespace gpbayes
