#include "problem.hpp"

#include "common.hpp"

namespace gpbayes::cli {

namespace {

std::shared_ptr<const ForwardModel> read_forward(const Config& cfg, std::string& type) {
  type = cfg.get_string("forward", "type", "identity");
  if (type == "identity") {
    const auto dim = cfg.get_size("forward", "dim", 1);
    if (dim < 1 || dim > 64) throw cfg.error("forward", "dim", "must be between 1 and 64");
    return std::make_shared<IdentityForward>(static_cast<int>(dim));
  }
  if (type == "scalar") {
    const std::string name = cfg.get_string("forward", "function", "linear");
    return FunctionForward::scalar(scalar_function(cfg, "forward", "function", "linear"), name);
  }
  if (type == "darcy") return std::make_shared<DarcyForward>(read_darcy(cfg, "forward"));
  throw cfg.error("forward", "type", "expected identity, scalar or darcy, got '" + type + "'");
}

NoiseModel read_noise(const Config& cfg, int dy) {
  const bool has_rows = cfg.has("noise", "row_1");
  if (has_rows && cfg.has("noise", "variances")) {
    throw cfg.error("noise", "variances", "give either variances or row_1..row_d, not both");
  }
  try {
    if (has_rows) {
      Eigen::MatrixXd gamma(dy, dy);
      for (int i = 0; i < dy; ++i) {
        gamma.row(i) = read_vector(cfg, "noise", "row_" + std::to_string(i + 1), dy).transpose();
      }
      return NoiseModel(gamma);
    }
    const Eigen::VectorXd v = read_vector(cfg, "noise", "variances", dy, std::vector<double>{1.0});
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      if (!(v[i] > 0.0)) throw cfg.error("noise", "variances", "must be positive");
    }
    return NoiseModel::diagonal(v);
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw cfg.error("noise", has_rows ? "row_1" : "variances", e.what());
  }
}

Prior read_prior(const Config& cfg, int du) {
  const std::string type = cfg.get_string("prior", "type", "gaussian");
  if (type == "gaussian") {
    const Eigen::VectorXd m = read_vector(cfg, "prior", "means", du, std::vector<double>{0.0});
    const Eigen::VectorXd v = read_vector(cfg, "prior", "variances", du, std::vector<double>{1.0});
    if ((v.array() <= 0.0).any()) throw cfg.error("prior", "variances", "must be positive");
    return Prior::gaussian(m, v);
  }
  if (type == "uniform") {
    const Eigen::VectorXd lo = read_vector(cfg, "prior", "lower", du);
    const Eigen::VectorXd hi = read_vector(cfg, "prior", "upper", du);
    if ((hi.array() <= lo.array()).any()) throw cfg.error("prior", "upper", "must exceed lower in every coordinate");
    return Prior::uniform(Box(lo, hi));
  }
  if (type == "lognormal") {
    const Eigen::VectorXd m = read_vector(cfg, "prior", "log_means", du, std::vector<double>{0.0});
    const Eigen::VectorXd v = read_vector(cfg, "prior", "log_variances", du, std::vector<double>{1.0});
    if ((v.array() <= 0.0).any()) throw cfg.error("prior", "log_variances", "must be positive");
    return Prior::lognormal(m, v);
  }
  throw cfg.error("prior", "type", "expected gaussian, uniform or lognormal, got '" + type + "'");
}

}  // namespace

Point prior_center(const Prior& prior) {
  return std::visit(
      [](const auto& p) -> Point {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GaussianDiagPrior>) {
          return p.means;
        } else if constexpr (std::is_same_v<T, UniformBoxPrior>) {
          return 0.5 * (p.box.lower + p.box.upper);
        } else {
          return p.log_means.array().exp().matrix();
        }
      },
      prior.variant());
}

ProblemSetup read_problem(const Config& cfg) {
  std::string type;
  auto forward = read_forward(cfg, type);
  const int du = forward->input_dim();
  const int dy = forward->output_dim();
  NoiseModel noise = read_noise(cfg, dy);
  Prior prior = read_prior(cfg, du);

  std::optional<Box> domain;
  if (cfg.has("domain", "lower") || cfg.has("domain", "upper")) {
    const Eigen::VectorXd lo = read_vector(cfg, "domain", "lower", du);
    const Eigen::VectorXd hi = read_vector(cfg, "domain", "upper", du);
    if ((hi.array() <= lo.array()).any()) throw cfg.error("domain", "upper", "must exceed lower in every coordinate");
    domain = Box(lo, hi);
  }

  std::optional<Point> true_u;
  Eigen::VectorXd y;
  if (cfg.get_bool("data", "synthesize", false)) {
    if (cfg.has("data", "y")) throw cfg.error("data", "y", "cannot be combined with synthesize = true");
    true_u = read_vector(cfg, "data", "true_u", du);
    const auto noise_seed = cfg.get_u64("data", "noise_seed", 1);
    try {
      y = synthesize_data(*forward, noise, *true_u, noise_seed);
    } catch (const InvalidArgument& e) {
      throw cfg.error("data", "true_u", e.what());
    }
  } else {
    y = read_vector(cfg, "data", "y", dy);
  }

  try {
    return ProblemSetup{BayesProblem(forward, y, std::move(noise), std::move(prior), domain), type, true_u};
  } catch (const InvalidArgument& e) {
    throw cfg.error("prior", "type", e.what());
  }
}

}  // namespace gpbayes::cli
