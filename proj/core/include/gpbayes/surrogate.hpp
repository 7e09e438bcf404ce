#pragma once

#include "gpbayes/bayes.hpp"
#include "gpbayes/gp.hpp"

#include <cstdint>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

namespace gpbayes {

enum class SurrogateKind { MeanBased, Marginal, SampleBased };

std::string_view to_string(SurrogateKind kind);
/// "mean", "marginal" or "sample".
SurrogateKind parse_surrogate_kind(std::string_view name);

/// GP emulator of the negative log-likelihood Phi.
struct EmulatePhi {
  GPPosterior gp;
};

/// Independent GP emulators of each output of G, sharing design and kernel.
struct EmulateG {
  std::vector<GPPosterior> outputs;
};

using SurrogateTarget = std::variant<EmulatePhi, EmulateG>;

/// Where the frozen path of a sample-based surrogate is realized (1-D only).
struct SampleOptions {
  std::uint64_t seed = 0;
  std::size_t grid_nodes = 513;
  /// Defaults to the problem domain.
  std::optional<Box> grid_box;
};

/// Approximate posterior built from a GP emulator.
///
/// Unnormalized log-densities, by kind and target:
///   mean / Phi:      log pi_0 - m(u)
///   marginal / Phi:  log pi_0 - m(u) + k(u,u)/2
///   mean / G:        log pi_0 - |y - m(u)|^2_Gamma / 2
///   marginal / G:    log pi_0 - log det(I + Gamma^{-1} K(u)) / 2 - |y - m(u)|^2_{Gamma + K(u)} / 2
///   sample / Phi:    log pi_0 - Phi_N(u) for one frozen path, linearly interpolated
/// The marginal / G form drops the constant log det Gamma, which cancels on normalization.
class SurrogatePosterior {
 public:
  /// Throws InvalidArgument for dimension mismatches or for a sample-based surrogate of
  /// G or in more than one dimension.
  SurrogatePosterior(SurrogateKind kind, SurrogateTarget target, BayesProblem problem, SampleOptions sample = {});

  [[nodiscard]] SurrogateKind kind() const noexcept { return kind_; }
  [[nodiscard]] const SurrogateTarget& target() const noexcept { return target_; }
  [[nodiscard]] const BayesProblem& problem() const noexcept { return problem_; }

  /// Surrogate log-likelihood (without the prior). Throws ExtrapolationError outside the
  /// path grid for the sample-based kind.
  [[nodiscard]] double log_likelihood(const Point& u) const;
  /// log pi_0(u) + log_likelihood(u); -infinity outside the prior support.
  [[nodiscard]] double unnormalized_log_density(const Point& u) const;

  /// Returns a copy carrying Z_N.
  [[nodiscard]] SurrogatePosterior normalize(const EvidenceMethod& method = QuadratureMethod{}) const;
  [[nodiscard]] bool is_normalized() const noexcept { return evidence_.has_value(); }
  /// Throws std::logic_error before normalize().
  [[nodiscard]] const EvidenceEstimate& evidence() const;
  [[nodiscard]] double log_density(const Point& u) const;
  [[nodiscard]] double density(const Point& u) const;

  /// Frozen path of the sample-based kind: grid abscissae and values.
  [[nodiscard]] const std::vector<double>& path_grid() const noexcept { return path_grid_; }
  [[nodiscard]] const Eigen::VectorXd& path_values() const noexcept { return path_values_; }

 private:
  SurrogateKind kind_;
  SurrogateTarget target_;
  BayesProblem problem_;
  std::vector<double> path_grid_;
  Eigen::VectorXd path_values_;
  std::optional<EvidenceEstimate> evidence_;
};

/// Runs Phi at every design point and conditions a GP on the values (no nugget).
EmulatePhi train_phi_emulator(const BayesProblem& problem, const Design& design, const KernelSpec& kernel,
                              const MeanFunction& mean = MeanFunction::zero());

/// Runs G once per design point and conditions one GP per output.
EmulateG train_forward_emulator(const BayesProblem& problem, const Design& design, const KernelSpec& kernel,
                                const MeanFunction& mean = MeanFunction::zero());

struct MonteCarloEstimate {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of E[exp(-X)] for X ~ N(m, k).
MonteCarloEstimate lognormal_expectation_mc(double m, double k, std::size_t draws, std::uint64_t seed);

/// Estimates E[exp(-Phi_N(u))] by sampling Phi_N(u) from the emulator; a test oracle
/// for the closed form exp(-m + k/2). Requires an EmulatePhi target.
MonteCarloEstimate monte_carlo_marginal_check(const SurrogatePosterior& s, const Point& u, std::size_t draws,
                                              std::uint64_t seed);

}  // namespace gpbayes
