#include "common.hpp"
#include "experiments.hpp"

#include "gpbayes/random.hpp"

#include <cmath>

namespace gpbayes::cli {

namespace {

constexpr const char* kSection = "sample_paths";

struct Panel {
  KernelSpec kernel;
};

// Mean over paths of the lag-1 sample autocorrelation along the grid.
double lag1_autocorrelation(const Eigen::MatrixXd& paths) {
  double total = 0.0;
  for (Eigen::Index s = 0; s < paths.cols(); ++s) {
    const Eigen::VectorXd x = paths.col(s).array() - paths.col(s).mean();
    const Eigen::Index n = x.size();
    const double denom = x.squaredNorm();
    const double num = x.head(n - 1).dot(x.tail(n - 1));
    total += denom > 0.0 ? num / denom : 0.0;
  }
  return total / static_cast<double>(paths.cols());
}

std::vector<Row> path_rows(const PointSet& grid, const Eigen::VectorXd& mean, const Eigen::VectorXd& sd,
                           const Eigen::MatrixXd& paths, const std::function<double(double)>* truth) {
  std::vector<Row> rows;
  rows.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    Row r{cell(grid[i][0])};
    if (truth) r.push_back(cell((*truth)(grid[i][0])));
    r.push_back(cell(mean[ii]));
    r.push_back(cell(sd[ii]));
    r.push_back(cell(mean[ii] - sd[ii]));
    r.push_back(cell(mean[ii] + sd[ii]));
    for (Eigen::Index s = 0; s < paths.cols(); ++s) r.push_back(cell(paths(ii, s)));
    rows.push_back(std::move(r));
  }
  return rows;
}

Row path_header(std::size_t count, bool with_truth) {
  Row h{"x"};
  if (with_truth) h.push_back("truth");
  for (const char* c : {"mean", "std", "lower", "upper"}) h.push_back(c);
  for (std::size_t s = 1; s <= count; ++s) h.push_back("sample_" + std::to_string(s));
  return h;
}

class SamplePaths final : public Experiment {
 public:
  explicit SamplePaths(const Config& cfg) {
    lo_ = cfg.get_double(kSection, "grid_min", 0.0);
    hi_ = cfg.get_double(kSection, "grid_max", 5.0);
    if (!(hi_ > lo_)) throw cfg.error(kSection, "grid_max", "must exceed grid_min");
    nodes_ = cfg.get_size(kSection, "grid_nodes", 501);
    if (nodes_ < 2) throw cfg.error(kSection, "grid_nodes", "need at least 2 nodes");
    paths_ = cfg.get_size(kSection, "paths", 5);
    if (paths_ == 0) throw cfg.error(kSection, "paths", "must be positive");

    const auto families = cfg.get_strings(kSection, "families", std::vector<std::string>{"matern12", "sqexp"});
    const auto lengthscales = cfg.get_doubles(kSection, "lengthscales", std::vector<double>{1.0, 0.1});
    const double variance = cfg.get_positive(kSection, "variance", 1.0);
    for (double l : lengthscales) {
      if (!(l > 0.0)) throw cfg.error(kSection, "lengthscales", "must be positive");
    }
    for (const auto& f : families) {
      KernelFamily fam{};
      try {
        fam = parse_kernel_family(f);
      } catch (const InvalidArgument&) {
        throw cfg.error(kSection, "families", "unknown kernel family '" + f + "'");
      }
      for (double l : lengthscales) panels_.push_back(Panel{KernelSpec(fam, l, variance)});
    }

    posterior_function_name_ = cfg.get_string(kSection, "posterior_function", "sin_shift_sq");
    posterior_function_ = scalar_function(cfg, kSection, "posterior_function", "sin_shift_sq");
    posterior_design_ = cfg.get_doubles(kSection, "posterior_design", std::vector<double>{0.5, 2.5, 4.5});
    fit_ = cfg.get_bool(kSection, "posterior_fit", true);
    grid_ = read_hyper_grid(cfg, kSection);
    posterior_lengthscale_ = cfg.get_positive(kSection, "posterior_lengthscale", 0.1);
    posterior_variance_ = cfg.get_positive(kSection, "posterior_variance", 0.63 * 0.63);
    posterior_families_ =
        cfg.get_strings(kSection, "posterior_families", std::vector<std::string>{"matern12", "sqexp"});
    for (const auto& f : posterior_families_) {
      try {
        (void)parse_kernel_family(f);
      } catch (const InvalidArgument&) {
        throw cfg.error(kSection, "posterior_families", "unknown kernel family '" + f + "'");
      }
    }
  }

  void run(OutputDir& out, const RunOptions& options) override {
    const PointSet grid = linspace1(lo_, hi_, nodes_);

    std::vector<Row> index;
    for (std::size_t p = 0; p < panels_.size(); ++p) {
      const KernelSpec& k = panels_[p].kernel;
      const auto process = GPPosterior::unconditioned(GPPrior{MeanFunction::zero(), k});
      const Eigen::MatrixXd paths = sample_paths_on_grid(process, grid, paths_, stream_seed(options.seed, p));
      const Eigen::VectorXd mean = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.size()));
      const Eigen::VectorXd sd = Eigen::VectorXd::Constant(mean.size(), std::sqrt(k.variance()));
      const std::string name = "prior_panel" + std::to_string(p + 1) + ".csv";
      out.csv(name, path_header(paths_, false), path_rows(grid, mean, sd, paths, nullptr));
      index.push_back({cell(p + 1), std::string(to_string(k.family())), cell(k.lengthscale()), cell(k.variance()),
                       cell(lag1_autocorrelation(paths)), name});
    }
    out.csv("prior_panels.csv", {"panel", "family", "lengthscale", "variance", "lag1_autocorrelation", "file"}, index);

    const PointSet design = points1(posterior_design_);
    Observations obs(static_cast<Eigen::Index>(design.size()));
    for (std::size_t i = 0; i < design.size(); ++i) obs[static_cast<Eigen::Index>(i)] = posterior_function_(design[i][0]);
    std::vector<Row> design_rows;
    for (std::size_t i = 0; i < design.size(); ++i) {
      design_rows.push_back({cell(design[i][0]), cell(obs[static_cast<Eigen::Index>(i)])});
    }
    out.csv("posterior_design.csv", {"x", "f"}, design_rows);

    std::vector<Row> post_index;
    for (std::size_t p = 0; p < posterior_families_.size(); ++p) {
      const KernelFamily fam = parse_kernel_family(posterior_families_[p]);
      const KernelSpec kernel = fit_ ? fit_hyperparameters(fam, design, obs, grid_)
                                     : KernelSpec(fam, posterior_lengthscale_, posterior_variance_);
      const auto gp = GPPosterior::fit(GPPrior{MeanFunction::zero(), kernel}, design, obs);
      const Eigen::MatrixXd paths =
          sample_paths_on_grid(gp, grid, paths_, stream_seed(options.seed, 1000 + p));
      const Eigen::VectorXd mean = gp.predict_mean(grid);
      const Eigen::VectorXd sd = gp.predict_var(grid).array().sqrt();
      const std::string name = "posterior_panel" + std::to_string(p + 1) + ".csv";
      out.csv(name, path_header(paths_, true), path_rows(grid, mean, sd, paths, &posterior_function_));
      post_index.push_back({cell(p + 1), std::string(to_string(kernel.family())), cell(kernel.lengthscale()),
                            cell(kernel.variance()), fit_ ? "fitted" : "fixed",
                            cell(log_marginal_likelihood(GPPrior{MeanFunction::zero(), kernel}, design, obs)), name});
    }
    out.csv("posterior_panels.csv",
            {"panel", "family", "lengthscale", "variance", "hyperparameters", "log_marginal_likelihood", "file"},
            post_index);
    out.key_values("diagnostics.txt", {{"function", posterior_function_name_},
                                       {"design_points", cell(design.size())},
                                       {"grid_nodes", cell(nodes_)},
                                       {"paths", cell(paths_)}});
  }

 private:
  double lo_ = 0.0;
  double hi_ = 5.0;
  std::size_t nodes_ = 501;
  std::size_t paths_ = 5;
  std::vector<Panel> panels_;
  std::string posterior_function_name_;
  std::function<double(double)> posterior_function_;
  std::vector<double> posterior_design_;
  std::vector<std::string> posterior_families_;
  bool fit_ = true;
  HyperparameterGrid grid_;
  double posterior_lengthscale_ = 0.1;
  double posterior_variance_ = 0.63 * 0.63;
};

}  // namespace

std::unique_ptr<Experiment> make_sample_paths(const Config& cfg) { return std::make_unique<SamplePaths>(cfg); }

}  // namespace gpbayes::cli
