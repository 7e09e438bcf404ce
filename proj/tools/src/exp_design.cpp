#include "common.hpp"
#include "experiments.hpp"

#include "gpbayes/design.hpp"
#include "gpbayes/metrics.hpp"
#include "gpbayes/quadrature.hpp"

#include <cmath>
#include <numbers>

namespace gpbayes::cli {

namespace {

constexpr const char* kSection = "design_study";

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    out[i] = std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo)));
  }
  if (n > 1) out.back() = hi;
  return out;
}

void check_n_list(const Config& cfg, const std::string& section, const std::vector<std::size_t>& ns) {
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] == 0) throw cfg.error(section, "n_list", "design sizes must be positive");
    if (i > 0 && ns[i] <= ns[i - 1]) throw cfg.error(section, "n_list", "design sizes must be strictly increasing");
  }
}

void write_report(OutputDir& out, const ErrorReport& report, const std::string& param_name) {
  std::vector<Row> rows;
  rows.reserve(report.cells.size());
  for (const auto& c : report.cells) {
    rows.push_back({cell(c.n), cell(c.measure_param), cell(c.e), cell(c.std_error), cell(c.resamples)});
  }
  out.csv("errors.csv", {"N", "measure_param", "e_estimate", "std_error", "resamples"}, rows);
  KeyValues kv{{"measure_param", param_name},
               {"kernel", report.kernel},
               {"target", report.target},
               {"weight", report.weight},
               {"seed", std::to_string(report.seed)},
               {"replications", report.cells.empty() ? "0" : cell(report.cells.front().replications)}};
  for (std::size_t i = 0; i < report.warnings.size(); ++i) kv.emplace_back("warning_" + std::to_string(i + 1), report.warnings[i]);
  out.key_values("diagnostics.txt", kv);
}

// Shared keys of both error studies.
struct StudyCommon {
  std::string f_name;
  std::function<double(double)> f;
  std::vector<std::size_t> n_list;
  std::size_t replications = 1000;
  std::size_t weight_nodes = 1025;
  KernelSpec kernel;

  explicit StudyCommon(const Config& cfg)
      : f_name(cfg.get_string(kSection, "function", "linear")),
        f(scalar_function(cfg, kSection, "function", "linear")),
        n_list(cfg.get_sizes(kSection, "n_list", std::vector<std::size_t>{2, 4, 8, 16})),
        replications(cfg.get_size(kSection, "replications", 1000)),
        weight_nodes(cfg.get_size(kSection, "weight_nodes", 1025)),
        kernel(read_kernel(cfg, "kernel", "sqexp", 1.0, 1.0)) {
    check_n_list(cfg, kSection, n_list);
    if (replications < 2) throw cfg.error(kSection, "replications", "need at least 2 replications");
    if (weight_nodes < 3) throw cfg.error(kSection, "weight_nodes", "need at least 3 nodes");
  }

  ErrorReport run(const WeightSpec& weight, const std::vector<DesignMeasure>& measures,
                  const std::vector<double>& params, const RunOptions& options) const {
    DesignErrorOptions o;
    o.n_list = n_list;
    o.replications = replications;
    o.seed = options.seed;
    o.threads = options.threads;
    const auto fp = [g = f](const Point& u) { return g(u[0]); };
    return design_error_study(fp, f_name, GPPrior{MeanFunction::zero(), kernel}, weight, measures, params, o);
  }
};

class DesignStudyGaussian final : public Experiment {
 public:
  explicit DesignStudyGaussian(const Config& cfg) : common_(cfg) {
    mean_ = cfg.get_double(kSection, "posterior_mean", 1.0);
    sd_ = cfg.get_positive(kSection, "posterior_sd", 1.0);
    center_ = cfg.get_double(kSection, "design_center", 1.0);
    if (cfg.has(kSection, "sigmas")) {
      sigmas_ = cfg.get_doubles(kSection, "sigmas");
      for (double s : sigmas_) {
        if (!(s > 0.0)) throw cfg.error(kSection, "sigmas", "must be positive");
      }
    } else {
      const double lo = cfg.get_positive(kSection, "sigma_min", 0.1);
      const double hi = cfg.get_positive(kSection, "sigma_max", 10.0);
      const std::size_t n = cfg.get_size(kSection, "sigma_count", 13);
      if (hi <= lo) throw cfg.error(kSection, "sigma_max", "must exceed sigma_min");
      if (n == 0) throw cfg.error(kSection, "sigma_count", "must be positive");
      sigmas_ = log_grid(lo, hi, n);
    }
  }

  void run(OutputDir& out, const RunOptions& options) override {
    const double m = mean_;
    const double s = sd_;
    WeightSpec weight{[m, s](const Point& u) {
                        const double z = (u[0] - m) / s;
                        return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * std::numbers::pi));
                      },
                      gaussian_weight_grid(m, s, common_.weight_nodes),
                      "N(" + cell(m) + ", " + cell(s * s) + ")"};
    std::vector<DesignMeasure> measures;
    for (double sigma : sigmas_) measures.push_back(DesignMeasure::gaussian1(center_, sigma));
    write_report(out, common_.run(weight, measures, sigmas_, options), "sigma");
  }

 private:
  StudyCommon common_;
  double mean_ = 1.0;
  double sd_ = 1.0;
  double center_ = 1.0;
  std::vector<double> sigmas_;
};

class DesignStudyUniform final : public Experiment {
 public:
  explicit DesignStudyUniform(const Config& cfg) : common_(cfg) {
    halfwidth_ = cfg.get_positive(kSection, "posterior_halfwidth", 1.0);
    epsilons_ = cfg.get_doubles(kSection, "epsilons", std::vector<double>{0.25, 0.5, 1.0, 2.0});
    for (double e : epsilons_) {
      if (!(e > 0.0)) throw cfg.error(kSection, "epsilons", "must be positive");
    }
  }

  void run(OutputDir& out, const RunOptions& options) override {
    const double a = halfwidth_;
    WeightSpec weight{[a](const Point& u) { return std::abs(u[0]) <= a ? 0.5 / a : 0.0; },
                      trapezoid_grid(Box::interval(-a, a), common_.weight_nodes),
                      "U[-" + cell(a) + ", " + cell(a) + "]"};
    std::vector<DesignMeasure> measures;
    for (double e : epsilons_) measures.push_back(DesignMeasure::uniform(Box::interval(-e, e)));
    write_report(out, common_.run(weight, measures, epsilons_, options), "epsilon");
  }

 private:
  StudyCommon common_;
  double halfwidth_ = 1.0;
  std::vector<double> epsilons_;
};

constexpr const char* kFill = "fill";

class DesignStudyFill final : public Experiment {
 public:
  explicit DesignStudyFill(const Config& cfg) {
    dim_ = static_cast<int>(cfg.get_size(kFill, "dim", 1));
    if (dim_ < 1 || dim_ > 2) throw cfg.error(kFill, "dim", "fill-distance studies support dim 1 or 2");
    box_ = Box(read_vector(cfg, kFill, "lower", dim_, std::vector<double>{0.0}),
               read_vector(cfg, kFill, "upper", dim_, std::vector<double>{1.0}));
    if ((box_.upper.array() <= box_.lower.array()).any()) throw cfg.error(kFill, "upper", "must exceed lower");
    measure_ = cfg.get_string(kFill, "measure", "uniform");
    if (measure_ == "gaussian") {
      center_ = read_vector(cfg, kFill, "center", dim_, std::vector<double>{0.5});
      sd_ = read_vector(cfg, kFill, "sd", dim_, std::vector<double>{0.25});
      if ((sd_.array() <= 0.0).any()) throw cfg.error(kFill, "sd", "must be positive");
    } else if (measure_ != "uniform") {
      throw cfg.error(kFill, "measure", "expected uniform or gaussian, got '" + measure_ + "'");
    }
    region_ = cfg.get_string(kFill, "region", "box");
    if (region_ == "truncation") {
      if (measure_ != "gaussian") throw cfg.error(kFill, "region", "truncation regions need measure = gaussian");
      threshold_ = cfg.get_positive(kFill, "threshold");
    } else if (region_ != "box") {
      throw cfg.error(kFill, "region", "expected box or truncation, got '" + region_ + "'");
    }
    options_.n_list = cfg.get_sizes(kFill, "n_list", std::vector<std::size_t>{16, 32, 64, 128, 256, 512, 1024});
    check_n_list(cfg, kFill, options_.n_list);
    options_.replications = cfg.get_size(kFill, "replications", 200);
    if (options_.replications < 30) throw cfg.error(kFill, "replications", "need at least 30 replications");
    options_.resolution = cfg.get_size(kFill, "resolution", kDefaultFillResolution);
    if (options_.resolution < 8) throw cfg.error(kFill, "resolution", "need at least 8");
    options_.tail_threshold = cfg.get_double(kFill, "tail_threshold", 0.0);
    if (options_.tail_threshold < 0.0) throw cfg.error(kFill, "tail_threshold", "must be non-negative");
  }

  void run(OutputDir& out, const RunOptions& options) override {
    FillDecayOptions o = options_;
    o.seed = options.seed;
    o.threads = options.threads;
    const DesignMeasure measure =
        measure_ == "uniform" ? DesignMeasure::uniform(box_) : DesignMeasure::gaussian(center_, sd_);
    FillRegion region = box_;
    if (region_ == "truncation") {
      region = truncation_region([measure](const Point& u) { return measure.density(u); }, threshold_, box_);
    }
    const FillDecayResult res = fill_decay_study(measure, region, o);

    std::vector<Row> reps;
    for (std::size_t i = 0; i < res.rows.size(); ++i) {
      for (std::size_t r = 0; r < res.replicate_h[i].size(); ++r) {
        reps.push_back({cell(res.rows[i].n), cell(r), cell(res.replicate_h[i][r])});
      }
    }
    out.csv("fill_replicates.csv", {"N", "replicate", "h"}, reps);
    std::vector<Row> rows;
    for (const auto& row : res.rows) {
      rows.push_back({cell(row.n), cell(row.mean_h), cell(row.std_error), cell(row.q10), cell(row.q90),
                      cell(row.tail_probability), cell(row.tail_std_error)});
    }
    out.csv("fill_summary.csv", {"N", "mean_h", "std_error", "q10", "q90", "tail_probability", "tail_std_error"},
            rows);
    out.key_values("diagnostics.txt", {{"measure", measure.description()},
                                       {"region", region_},
                                       {"dim", std::to_string(dim_)},
                                       {"slope", cell(res.slope)},
                                       {"tail_threshold", cell(res.tail_threshold)},
                                       {"replications", cell(o.replications)}});
  }

 private:
  int dim_ = 1;
  Box box_;
  std::string measure_;
  Eigen::VectorXd center_;
  Eigen::VectorXd sd_;
  std::string region_;
  double threshold_ = 0.0;
  FillDecayOptions options_;
};

}  // namespace

std::unique_ptr<Experiment> make_design_study_gaussian(const Config& cfg) {
  return std::make_unique<DesignStudyGaussian>(cfg);
}
std::unique_ptr<Experiment> make_design_study_uniform(const Config& cfg) {
  return std::make_unique<DesignStudyUniform>(cfg);
}
std::unique_ptr<Experiment> make_design_study_fill(const Config& cfg) { return std::make_unique<DesignStudyFill>(cfg); }

}  // namespace gpbayes::cli
