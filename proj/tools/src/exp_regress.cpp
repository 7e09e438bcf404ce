#include "common.hpp"
#include "experiments.hpp"

#include "gpbayes/design.hpp"
#include "gpbayes/random.hpp"

#include <cmath>

namespace gpbayes::cli {

namespace {

constexpr const char* kSection = "regress";

class Regress final : public Experiment {
 public:
  explicit Regress(const Config& cfg)
      : kernel_(read_kernel(cfg, "kernel", "sqexp", 1.0, 1.0)) {
    function_name_ = cfg.get_string(kSection, "function", "sin_shift_sq");
    f_ = scalar_function(cfg, kSection, "function", "sin_shift_sq");
    lo_ = cfg.get_double(kSection, "grid_min", 0.0);
    hi_ = cfg.get_double(kSection, "grid_max", 5.0);
    if (!(hi_ > lo_)) throw cfg.error(kSection, "grid_max", "must exceed grid_min");
    nodes_ = cfg.get_size(kSection, "grid_nodes", 201);
    if (nodes_ < 2) throw cfg.error(kSection, "grid_nodes", "need at least 2 nodes");
    samples_ = cfg.get_size(kSection, "samples", 3);

    design_mode_ = cfg.get_string(kSection, "design", "points");
    if (design_mode_ == "points") {
      points_ = cfg.get_doubles(kSection, "points", std::vector<double>{0.5, 2.5, 4.5});
    } else if (design_mode_ == "uniform" || design_mode_ == "grid") {
      n_ = cfg.get_size(kSection, "n_train", 8);
      if (n_ == 0) throw cfg.error(kSection, "n_train", "must be positive");
    } else {
      throw cfg.error(kSection, "design", "expected points, uniform or grid, got '" + design_mode_ + "'");
    }
    noise_ = cfg.get_double(kSection, "noise_variance", 0.0);
    if (noise_ < 0.0) throw cfg.error(kSection, "noise_variance", "must be non-negative");
    fit_ = cfg.get_bool(kSection, "fit_hyperparameters", false);
    grid_ = read_hyper_grid(cfg, kSection);
  }

  void run(OutputDir& out, const RunOptions& options) override {
    PointSet design;
    if (design_mode_ == "points") {
      design = points1(points_);
    } else if (design_mode_ == "grid") {
      design = linspace1(lo_, hi_, n_);
    } else {
      design = sample_design(DesignMeasure::uniform(Box::interval(lo_, hi_)), n_, stream_seed(options.seed, 0));
    }
    Observations obs(static_cast<Eigen::Index>(design.size()));
    for (std::size_t i = 0; i < design.size(); ++i) obs[static_cast<Eigen::Index>(i)] = f_(design[i][0]);

    const KernelSpec kernel = fit_ ? fit_hyperparameters(kernel_.family(), design, obs, grid_, noise_) : kernel_;
    const auto gp = GPPosterior::fit(GPPrior{MeanFunction::zero(), kernel}, design, obs, noise_);
    const PointSet grid = linspace1(lo_, hi_, nodes_);
    const Eigen::VectorXd mean = gp.predict_mean(grid);
    const Eigen::VectorXd var = gp.predict_var(grid);
    Eigen::MatrixXd paths;
    if (samples_ > 0) paths = sample_paths_on_grid(gp, grid, samples_, stream_seed(options.seed, 1));

    Row header{"x", "truth", "mean", "std"};
    for (std::size_t s = 1; s <= samples_; ++s) header.push_back("sample_" + std::to_string(s));
    std::vector<Row> rows;
    double max_err = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      const double truth = f_(grid[i][0]);
      max_err = std::max(max_err, std::abs(truth - mean[ii]));
      Row r{cell(grid[i][0]), cell(truth), cell(mean[ii]), cell(std::sqrt(var[ii]))};
      for (std::size_t s = 0; s < samples_; ++s) r.push_back(cell(paths(ii, static_cast<Eigen::Index>(s))));
      rows.push_back(std::move(r));
    }
    out.csv("predictions.csv", header, rows);

    std::vector<Row> drows;
    for (std::size_t i = 0; i < design.size(); ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      drows.push_back({cell(design[i][0]), cell(obs[ii]), cell(gp.predict_mean(design[i])),
                       cell(std::sqrt(gp.predict_var(design[i])))});
    }
    out.csv("design.csv", {"x", "f", "mean", "std"}, drows);

    out.key_values("diagnostics.txt",
                   {{"function", function_name_},
                    {"family", std::string(to_string(kernel.family()))},
                    {"lengthscale", cell(kernel.lengthscale())},
                    {"variance", cell(kernel.variance())},
                    {"hyperparameters", fit_ ? "fitted" : "fixed"},
                    {"log_marginal_likelihood", cell(log_marginal_likelihood(gp.prior(), design, obs, noise_))},
                    {"jitter", cell(gp.jitter())},
                    {"max_abs_error_on_grid", cell(max_err)}});
  }

 private:
  KernelSpec kernel_;
  std::string function_name_;
  std::function<double(double)> f_;
  double lo_ = 0.0;
  double hi_ = 5.0;
  std::size_t nodes_ = 201;
  std::size_t samples_ = 3;
  std::string design_mode_;
  std::vector<double> points_;
  std::size_t n_ = 0;
  double noise_ = 0.0;
  bool fit_ = false;
  HyperparameterGrid grid_;
};

}  // namespace

std::unique_ptr<Experiment> make_regress(const Config& cfg) { return std::make_unique<Regress>(cfg); }

}  // namespace gpbayes::cli
