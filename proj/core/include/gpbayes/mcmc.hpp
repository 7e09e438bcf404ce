#pragma once

#include "gpbayes/random.hpp"
#include "gpbayes/types.hpp"

#include <cstdint>
#include <functional>
#include <vector>

namespace gpbayes {

using LogDensity = std::function<double(const Point&)>;

/// Proposal kernel q(u'|u).
struct Proposal {
  std::function<Point(const Point&, Rng&)> draw;
  /// log q(to | from); may be omitted for symmetric proposals.
  std::function<double(const Point& to, const Point& from)> log_density;
  bool symmetric = true;
  /// Per-coordinate step of a random walk, for reporting; empty otherwise.
  Eigen::VectorXd step;
};

/// u' = u + step * xi, xi ~ N(0, I). A scalar step applies to every coordinate.
Proposal random_walk_proposal(double step);
Proposal random_walk_proposal(Eigen::VectorXd step);

struct Chain {
  PointSet samples;
  std::vector<double> log_densities;
  /// accepted[0] is true by convention (the initial state).
  std::vector<bool> accepted;
  /// Log-density of every proposed point, accepted or not.
  std::vector<double> proposal_log_densities;
  Eigen::VectorXd step;
  std::uint64_t seed = 0;

  [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
};

/// Random-walk (or general) Metropolis-Hastings with log-domain acceptance: accept iff
/// log U < log pi(u') - log pi(u) + log q(u|u') - log q(u'|u). Returns n states including
/// the initial one.
/// Throws InvalidArgument when log_target(init) is -infinity or n = 0, and NumericalError
/// naming the point when log_target returns NaN.
Chain metropolis_hastings(const LogDensity& log_target, const Proposal& proposal, const Point& init, std::size_t n,
                          std::uint64_t seed);

struct ChainDiagnostics {
  double acceptance_rate = 0.0;
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;
  /// Integrated autocorrelation time per coordinate.
  Eigen::VectorXd iact;
  std::size_t burn_in = 0;
  std::size_t kept = 0;
};

/// Estimators over samples[burn_in:]. IACT uses Geyer's initial positive sequence.
/// Throws InvalidArgument if nothing remains after burn-in.
ChainDiagnostics chain_diagnostics(const Chain& chain, std::size_t burn_in);

/// 20% of the chain.
std::size_t default_burn_in(std::size_t n);
/// 2.4 / sqrt(d).
double default_step(int dim);

/// Integrated autocorrelation time of a scalar series, 1 + 2 sum rho_k with the sum
/// truncated by the initial positive sequence rule. Constant series give 1.
double integrated_autocorrelation_time(const std::vector<double>& xs);

}  // namespace gpbayes
