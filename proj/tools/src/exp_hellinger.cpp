#include "common.hpp"
#include "experiments.hpp"

#include "gpbayes/metrics.hpp"
#include "gpbayes/quadrature.hpp"
#include "gpbayes/surrogate.hpp"

#include <cmath>

namespace gpbayes::cli {

namespace {

constexpr const char* kSection = "hellinger";

std::vector<double> normalized_density(const std::vector<double>& log_values, const QuadratureGrid& grid) {
  const double log_z = log_weighted_sum_exp(log_values, grid.weights);
  if (!std::isfinite(log_z)) throw UnderflowError("hellinger-convergence: density vanishes on the grid");
  std::vector<double> out(log_values.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::exp(log_values[i] - log_z);
  return out;
}

// Posterior-weighted L2 norm of a pointwise quantity given as squares.
double weighted_norm(const std::vector<double>& squares, const std::vector<double>& density, const QuadratureGrid& grid) {
  double acc = 0.0;
  for (std::size_t i = 0; i < squares.size(); ++i) acc += grid.weights[i] * density[i] * squares[i];
  return std::sqrt(acc);
}

class HellingerConvergence final : public Experiment {
 public:
  explicit HellingerConvergence(const Config& cfg) : kernel_(read_kernel(cfg, "kernel", "sqexp", 1.5, 1.0)) {
    n_list_ = cfg.get_sizes(kSection, "n_list", std::vector<std::size_t>{4, 8, 16, 32, 64});
    for (std::size_t i = 0; i < n_list_.size(); ++i) {
      if (n_list_[i] == 0) throw cfg.error(kSection, "n_list", "design sizes must be positive");
      if (i > 0 && n_list_[i] <= n_list_[i - 1]) throw cfg.error(kSection, "n_list", "design sizes must be strictly increasing");
    }
    design_lower_ = cfg.get_double(kSection, "design_lower", -4.0);
    design_span_ = cfg.get_positive(kSection, "design_span", 9.0);
    prior_mean_ = cfg.get_double(kSection, "prior_mean", 0.0);
    prior_variance_ = cfg.get_positive(kSection, "prior_variance", 1.0);
    noise_variance_ = cfg.get_positive(kSection, "noise_variance", 1.0);
    y1_ = cfg.get_double(kSection, "y", 1.0);
    y2_ = cfg.get_doubles(kSection, "y_pair", std::vector<double>{1.0, 0.5});
    if (y2_.size() != 2) throw cfg.error(kSection, "y_pair", "expected 2 values");
    grid_nodes_ = cfg.get_size(kSection, "grid_nodes", 4097);
    if (grid_nodes_ < 3) throw cfg.error(kSection, "grid_nodes", "need at least 3 nodes");
  }

  void run(OutputDir& out, const RunOptions& /*options*/) override {
    Eigen::VectorXd m(1), v(1), g1(1), y1(1), y2(2);
    m << prior_mean_;
    v << prior_variance_;
    g1 << noise_variance_;
    y1 << y1_;
    y2 << y2_[0], y2_[1];
    const Prior prior = Prior::gaussian(m, v);

    const BayesProblem p1(std::make_shared<IdentityForward>(1), y1, NoiseModel::diagonal(g1), prior);
    auto quad = std::make_shared<FunctionForward>(
        1, 2,
        [](const Point& u) {
          Eigen::VectorXd g(2);
          g << u[0], 0.5 * u[0] * u[0];
          return g;
        },
        "u, u^2/2");
    const BayesProblem p2(quad, y2, NoiseModel::diagonal(Eigen::VectorXd::Constant(2, noise_variance_)), prior);

    const QuadratureGrid grid = trapezoid_grid(p1.domain(), grid_nodes_);
    const auto true_density = [&grid](const BayesProblem& p) {
      std::vector<double> lt(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) lt[i] = p.prior().log_density(grid.nodes[i]) - neg_log_likelihood(p, grid.nodes[i]);
      return normalized_density(lt, grid);
    };
    const std::vector<double> post1 = true_density(p1);
    const std::vector<double> post2 = true_density(p2);

    const auto surrogate_density = [&grid](const SurrogatePosterior& s) {
      std::vector<double> ls(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) ls[i] = s.unnormalized_log_density(grid.nodes[i]);
      return normalized_density(ls, grid);
    };
    const auto hell = [&grid](const std::vector<double>& p, const std::vector<double>& q) {
      return hellinger(std::span<const double>(p), std::span<const double>(q), grid).value;
    };

    std::vector<Row> rows1;
    std::vector<Row> rows2;
    for (std::size_t n : n_list_) {
      Design design;
      for (std::size_t i = 0; i < n; ++i) {
        design.push_back(point1(design_lower_ + design_span_ * static_cast<double>(i) / static_cast<double>(n)));
      }

      const EmulatePhi phi = train_phi_emulator(p1, design, kernel_);
      std::vector<double> err2(grid.size());
      std::vector<double> var(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double e = neg_log_likelihood(p1, grid.nodes[i]) - phi.gp.predict_mean(grid.nodes[i]);
        err2[i] = e * e;
        var[i] = phi.gp.predict_var(grid.nodes[i]);
      }
      const double l2 = weighted_norm(err2, post1, grid);
      const double kn = weighted_norm(var, post1, grid);
      const double h_mean = hell(post1, surrogate_density(SurrogatePosterior(SurrogateKind::MeanBased, phi, p1)));
      const double h_marg = hell(post1, surrogate_density(SurrogatePosterior(SurrogateKind::Marginal, phi, p1)));
      rows1.push_back({cell(n), cell(h_mean), cell(l2), cell(h_mean / l2), cell(h_marg), cell(l2 + kn),
                       cell(h_marg / (l2 + kn))});

      const EmulateG g = train_forward_emulator(p2, design, kernel_);
      double l2_sum = 0.0;
      for (std::size_t j = 0; j < g.outputs.size(); ++j) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
          const double e = p2.forward().evaluate(grid.nodes[i])[static_cast<Eigen::Index>(j)] -
                           g.outputs[j].predict_mean(grid.nodes[i]);
          err2[i] = e * e;
        }
        l2_sum += weighted_norm(err2, post2, grid);
      }
      // All outputs share the design and kernel, hence the same predictive variance.
      for (std::size_t i = 0; i < grid.size(); ++i) var[i] = g.outputs.front().predict_var(grid.nodes[i]);
      const double kn2 = weighted_norm(var, post2, grid);
      const double h2_mean = hell(post2, surrogate_density(SurrogatePosterior(SurrogateKind::MeanBased, g, p2)));
      const double h2_marg = hell(post2, surrogate_density(SurrogatePosterior(SurrogateKind::Marginal, g, p2)));
      rows2.push_back({cell(n), cell(h2_mean), cell(l2_sum), cell(h2_mean / l2_sum), cell(h2_marg),
                       cell(l2_sum + kn2), cell(h2_marg / (l2_sum + kn2))});
    }
    const Row header{"N", "hellinger_mean", "l2_error", "ratio_mean", "hellinger_marginal", "l2_error_plus_std",
                     "ratio_marginal"};
    out.csv("corollary1.csv", header, rows1);
    out.csv("corollary2.csv", header, rows2);
    out.key_values("diagnostics.txt", {{"kernel", std::string(to_string(kernel_.family()))},
                                       {"lengthscale", cell(kernel_.lengthscale())},
                                       {"variance", cell(kernel_.variance())},
                                       {"design", "u_i = lower + span * i / N, i = 0..N-1"},
                                       {"grid_nodes", cell(grid.size())},
                                       {"corollary1_forward", "identity"},
                                       {"corollary2_forward", "u, u^2/2"}});
  }

 private:
  KernelSpec kernel_;
  std::vector<std::size_t> n_list_;
  double design_lower_ = -4.0;
  double design_span_ = 9.0;
  double prior_mean_ = 0.0;
  double prior_variance_ = 1.0;
  double noise_variance_ = 1.0;
  double y1_ = 1.0;
  std::vector<double> y2_;
  std::size_t grid_nodes_ = 4097;
};

}  // namespace

std::unique_ptr<Experiment> make_hellinger_convergence(const Config& cfg) {
  return std::make_unique<HellingerConvergence>(cfg);
}

}  // namespace gpbayes::cli
