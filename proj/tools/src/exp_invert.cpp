#include "common.hpp"
#include "experiments.hpp"
#include "problem.hpp"

#include "gpbayes/design.hpp"
#include "gpbayes/mcmc.hpp"
#include "gpbayes/parallel.hpp"
#include "gpbayes/metrics.hpp"
#include "gpbayes/quadrature.hpp"
#include "gpbayes/random.hpp"
#include "gpbayes/surrogate.hpp"

#include <cmath>
#include <limits>

namespace gpbayes::cli {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

enum class ThresholdMode { Relative, Absolute, Rule };

class Invert final : public Experiment {
 public:
  explicit Invert(const Config& cfg)
      : setup_(read_problem(cfg)), kernel_(read_kernel(cfg, "kernel", "sqexp", 1.0, 1.0)) {
    const int d = setup_.problem.parameter_dim();
    if (d > 2) throw cfg.error("prior", "type", "invert evaluates densities on a grid and supports d_u <= 2");

    const std::string kind = cfg.get_string("surrogate", "kind", "mean");
    try {
      kind_ = parse_surrogate_kind(kind);
    } catch (const InvalidArgument&) {
      throw cfg.error("surrogate", "kind", "expected mean, marginal or sample, got '" + kind + "'");
    }
    target_ = cfg.get_string("surrogate", "target", "phi");
    if (target_ != "phi" && target_ != "g") throw cfg.error("surrogate", "target", "expected phi or g");
    if (kind_ == SurrogateKind::SampleBased && (target_ != "phi" || d != 1)) {
      throw cfg.error("surrogate", "kind", "sample-based surrogates need target = phi and a 1-D parameter");
    }
    n_train_ = cfg.get_size("surrogate", "n_train", 20);
    if (n_train_ == 0) throw cfg.error("surrogate", "n_train", "must be positive");
    design_ = cfg.get_string("surrogate", "design", "prior");
    if (design_ == "posterior") {
      const std::string mode = cfg.get_string("surrogate", "threshold_mode", "relative");
      if (mode == "relative") {
        mode_ = ThresholdMode::Relative;
        threshold_ = cfg.get_double("surrogate", "threshold", 0.05);
        if (!(threshold_ > 0.0 && threshold_ < 1.0)) throw cfg.error("surrogate", "threshold", "relative threshold must lie in (0, 1)");
      } else if (mode == "absolute") {
        mode_ = ThresholdMode::Absolute;
        threshold_ = cfg.get_positive("surrogate", "threshold");
      } else if (mode == "rule") {
        mode_ = ThresholdMode::Rule;
        rule_c_ = cfg.get_positive("surrogate", "rule_c");
        rule_tau_ = cfg.get_positive("surrogate", "rule_tau");
      } else {
        throw cfg.error("surrogate", "threshold_mode", "expected relative, absolute or rule, got '" + mode + "'");
      }
      scan_nodes_ = cfg.get_size("surrogate", "scan_nodes", d == 1 ? 1025 : 129);
      rejection_cap_ = cfg.get_size("surrogate", "rejection_cap", 1000000);
      if (rejection_cap_ == 0) throw cfg.error("surrogate", "rejection_cap", "must be positive");
      if (scan_nodes_ < 3) throw cfg.error("surrogate", "scan_nodes", "need at least 3 nodes");
    } else if (design_ != "prior" && design_ != "uniform") {
      throw cfg.error("surrogate", "design", "expected prior, uniform or posterior, got '" + design_ + "'");
    }
    design_seed_ = cfg.has("surrogate", "seed") ? std::optional(cfg.get_u64("surrogate", "seed")) : std::nullopt;
    path_nodes_ = cfg.get_size("surrogate", "path_nodes", 513);
    fit_ = cfg.get_bool("surrogate", "fit_hyperparameters", false);
    hyper_ = read_hyper_grid(cfg, "surrogate");

    steps_ = cfg.get_size("mcmc", "steps", 20000);
    if (steps_ < 2) throw cfg.error("mcmc", "steps", "need at least 2 steps");
    step_ = read_vector(cfg, "mcmc", "step", d, std::vector<double>{0.5});
    if ((step_.array() <= 0.0).any()) throw cfg.error("mcmc", "step", "must be positive");
    burn_in_ = cfg.get_size("mcmc", "burn_in", default_burn_in(steps_));
    if (burn_in_ >= steps_) throw cfg.error("mcmc", "burn_in", "must be smaller than steps");
    if (cfg.has("mcmc", "init")) {
      init_ = read_vector(cfg, "mcmc", "init", d);
    } else {
      init_ = setup_.true_u ? *setup_.true_u : prior_center(setup_.problem.prior());
    }
    if (!setup_.problem.domain().contains(init_)) throw cfg.error("mcmc", "init", "must lie inside the domain box");

    density_nodes_ = cfg.get_size("output", "density_nodes", d == 1 ? 1025 : 129);
    if (density_nodes_ < 3) throw cfg.error("output", "density_nodes", "need at least 3 nodes");
  }

  void run(OutputDir& out, const RunOptions& options) override {
    const BayesProblem& problem = setup_.problem;
    const Box& domain = problem.domain();
    const int d = problem.parameter_dim();
    const auto true_log = [&problem](const Point& u) -> double {
      const double lp = problem.prior().log_density(u);
      if (!std::isfinite(lp)) return kNegInf;
      return lp - neg_log_likelihood(problem, u);
    };

    problem.forward().reset_evaluation_count();
    const std::uint64_t dseed = design_seed_ ? *design_seed_ : stream_seed(options.seed, 1);
    double threshold_used = 0.0;
    const Design design = build_design(true_log, dseed, threshold_used);
    const std::uint64_t design_evaluations = problem.forward().evaluation_count();

    KernelSpec kernel = kernel_;
    SurrogateTarget target = [&]() -> SurrogateTarget {
      if (target_ == "phi") {
        if (fit_) {
          Observations obs(static_cast<Eigen::Index>(design.size()));
          for (std::size_t i = 0; i < design.size(); ++i) obs[static_cast<Eigen::Index>(i)] = neg_log_likelihood(problem, design[i]);
          kernel = fit_hyperparameters(kernel_.family(), design, obs, hyper_);
        }
        return train_phi_emulator(problem, design, kernel);
      }
      if (fit_) {
        Observations obs(static_cast<Eigen::Index>(design.size()));
        for (std::size_t i = 0; i < design.size(); ++i) obs[static_cast<Eigen::Index>(i)] = problem.forward().evaluate(design[i])[0];
        kernel = fit_hyperparameters(kernel_.family(), design, obs, hyper_);
      }
      return train_forward_emulator(problem, design, kernel);
    }();
    const SurrogatePosterior surrogate(kind_, target, problem,
                                       SampleOptions{stream_seed(options.seed, 2), path_nodes_, domain});
    const auto surrogate_log = [&surrogate, &domain](const Point& u) -> double {
      if (!domain.contains(u)) return kNegInf;
      return surrogate.unnormalized_log_density(u);
    };
    const auto true_log_in_domain = [&](const Point& u) -> double {
      if (!domain.contains(u)) return kNegInf;
      return true_log(u);
    };

    // Densities on a grid; both normalized by the same trapezoid rule.
    const QuadratureGrid grid = trapezoid_grid(domain, density_nodes_);
    std::vector<double> lt(grid.size());
    std::vector<double> ls(grid.size());
    parallel_for(grid.size(), options.threads, [&](std::size_t i) {
      lt[i] = true_log(grid.nodes[i]);
      ls[i] = surrogate.unnormalized_log_density(grid.nodes[i]);
    });
    const double log_zt = log_weighted_sum_exp(lt, grid.weights);
    const double log_zs = log_weighted_sum_exp(ls, grid.weights);
    if (!std::isfinite(log_zt) || !std::isfinite(log_zs)) {
      throw UnderflowError("invert: posterior density vanishes on the whole density grid");
    }
    std::vector<double> pt(grid.size());
    std::vector<double> ps(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      pt[i] = std::exp(lt[i] - log_zt);
      ps[i] = std::exp(ls[i] - log_zs);
    }
    const HellingerResult hell = hellinger(std::span<const double>(pt), std::span<const double>(ps), grid);

    const Proposal proposal = random_walk_proposal(step_);
    const Chain chain_true = metropolis_hastings(true_log_in_domain, proposal, init_, steps_, stream_seed(options.seed, 3));
    const Chain chain_sur = metropolis_hastings(surrogate_log, proposal, init_, steps_, stream_seed(options.seed, 4));
    const ChainDiagnostics diag_true = chain_diagnostics(chain_true, burn_in_);
    const ChainDiagnostics diag_sur = chain_diagnostics(chain_sur, burn_in_);

    write_chain(out, "chain_true.csv", chain_true, d);
    write_chain(out, "chain_surrogate.csv", chain_sur, d);

    Row dheader;
    for (int j = 0; j < d; ++j) dheader.push_back("u_" + std::to_string(j + 1));
    dheader.push_back("true_density");
    dheader.push_back("surrogate_density");
    std::vector<Row> drows;
    drows.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      Row r;
      for (int j = 0; j < d; ++j) r.push_back(cell(grid.nodes[i][j]));
      r.push_back(cell(pt[i]));
      r.push_back(cell(ps[i]));
      drows.push_back(std::move(r));
    }
    out.csv("densities.csv", dheader, drows);

    Row tr_header;
    for (int j = 0; j < d; ++j) tr_header.push_back("u_" + std::to_string(j + 1));
    std::vector<Row> trows;
    if (const auto* phi = std::get_if<EmulatePhi>(&target)) {
      tr_header.push_back("phi");
      for (std::size_t i = 0; i < design.size(); ++i) {
        Row r;
        for (int j = 0; j < d; ++j) r.push_back(cell(design[i][j]));
        r.push_back(cell(phi->gp.observations()[static_cast<Eigen::Index>(i)]));
        trows.push_back(std::move(r));
      }
    } else {
      const auto& outputs = std::get<EmulateG>(target).outputs;
      for (std::size_t k = 0; k < outputs.size(); ++k) tr_header.push_back("g_" + std::to_string(k + 1));
      for (std::size_t i = 0; i < design.size(); ++i) {
        Row r;
        for (int j = 0; j < d; ++j) r.push_back(cell(design[i][j]));
        for (const auto& gp : outputs) r.push_back(cell(gp.observations()[static_cast<Eigen::Index>(i)]));
        trows.push_back(std::move(r));
      }
    }
    out.csv("design.csv", tr_header, trows);

    // Grid moments of both densities.
    Eigen::VectorXd mean_t = Eigen::VectorXd::Zero(d);
    Eigen::VectorXd mean_s = Eigen::VectorXd::Zero(d);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      mean_t += grid.weights[i] * pt[i] * grid.nodes[i];
      mean_s += grid.weights[i] * ps[i] * grid.nodes[i];
    }
    std::vector<Row> summary{{"hellinger", cell(hell.value)},
                             {"log_evidence_true", cell(log_zt)},
                             {"log_evidence_surrogate", cell(log_zs)},
                             {"n_train", cell(design.size())},
                             {"acceptance_true", cell(diag_true.acceptance_rate)},
                             {"acceptance_surrogate", cell(diag_sur.acceptance_rate)}};
    for (int j = 0; j < d; ++j) {
      const std::string s = std::to_string(j + 1);
      summary.push_back({"grid_mean_true_" + s, cell(mean_t[j])});
      summary.push_back({"grid_mean_surrogate_" + s, cell(mean_s[j])});
      summary.push_back({"chain_mean_true_" + s, cell(diag_true.mean[j])});
      summary.push_back({"chain_mean_surrogate_" + s, cell(diag_sur.mean[j])});
      summary.push_back({"chain_var_true_" + s, cell(diag_true.variance[j])});
      summary.push_back({"chain_var_surrogate_" + s, cell(diag_sur.variance[j])});
    }
    out.csv("summary.csv", {"quantity", "value"}, summary);

    KeyValues kv{{"forward", setup_.forward_type},
                 {"surrogate_kind", std::string(to_string(kind_))},
                 {"surrogate_target", target_},
                 {"design", design_},
                 {"design_threshold", cell(threshold_used)},
                 {"design_forward_evaluations", cell(static_cast<std::size_t>(design_evaluations))},
                 {"kernel_family", std::string(to_string(kernel.family()))},
                 {"kernel_lengthscale", cell(kernel.lengthscale())},
                 {"kernel_variance", cell(kernel.variance())},
                 {"density_grid_nodes", cell(grid.size())},
                 {"hellinger", cell(hell.value)},
                 {"hellinger_warning", hell.warning.empty() ? "none" : hell.warning},
                 {"burn_in", cell(burn_in_)}};
    const auto add_chain = [&kv, d](const std::string& prefix, const ChainDiagnostics& dg) {
      kv.emplace_back(prefix + "_acceptance_rate", cell(dg.acceptance_rate));
      kv.emplace_back(prefix + "_kept", cell(dg.kept));
      for (int j = 0; j < d; ++j) {
        const std::string s = std::to_string(j + 1);
        kv.emplace_back(prefix + "_mean_" + s, cell(dg.mean[j]));
        kv.emplace_back(prefix + "_variance_" + s, cell(dg.variance[j]));
        kv.emplace_back(prefix + "_iact_" + s, cell(dg.iact[j]));
      }
    };
    add_chain("chain_true", diag_true);
    add_chain("chain_surrogate", diag_sur);
    out.key_values("diagnostics.txt", kv);
  }

 private:
  template <typename LogPost>
  Design build_design(const LogPost& true_log, std::uint64_t seed, double& threshold_used) const {
    const BayesProblem& problem = setup_.problem;
    const Box& domain = problem.domain();
    if (design_ == "prior") {
      Rng rng = make_rng(seed);
      Design out;
      out.reserve(n_train_);
      for (std::size_t i = 0; i < n_train_; ++i) out.push_back(problem.prior().sample(rng));
      return out;
    }
    if (design_ == "uniform") return sample_design(DesignMeasure::uniform(domain), n_train_, seed);

    // Posterior-region design: uniform on {u : pi_post(u) >= t}, found by scanning the domain.
    const QuadratureGrid scan = trapezoid_grid(domain, scan_nodes_);
    double shift = kNegInf;
    for (const auto& u : scan.nodes) shift = std::max(shift, true_log(u));
    if (!std::isfinite(shift)) throw UnderflowError("invert: posterior density vanishes on the scan grid");
    double t = 0.0;
    switch (mode_) {
      case ThresholdMode::Relative: t = threshold_; break;
      case ThresholdMode::Absolute: t = threshold_ * std::exp(-shift); break;
      case ThresholdMode::Rule:
        t = threshold_rule(rule_c_, rule_tau_, n_train_, problem.parameter_dim()) * std::exp(-shift);
        break;
    }
    threshold_used = mode_ == ThresholdMode::Relative ? t : t * std::exp(shift);
    auto reference = [true_log, shift](const Point& u) { return std::exp(true_log(u) - shift); };
    return sample_design(DesignMeasure::truncated(reference, t, domain, rejection_cap_), n_train_, seed);
  }

  static void write_chain(OutputDir& out, const std::string& name, const Chain& chain, int d) {
    Row header{"iteration"};
    for (int j = 0; j < d; ++j) header.push_back("u_" + std::to_string(j + 1));
    header.push_back("log_density");
    header.push_back("accepted");
    std::vector<Row> rows;
    rows.reserve(chain.size());
    for (std::size_t i = 0; i < chain.size(); ++i) {
      Row r{cell(i)};
      for (int j = 0; j < d; ++j) r.push_back(cell(chain.samples[i][j]));
      r.push_back(cell(chain.log_densities[i]));
      r.push_back(chain.accepted[i] ? "1" : "0");
      rows.push_back(std::move(r));
    }
    out.csv(name, header, rows);
  }

  ProblemSetup setup_;
  KernelSpec kernel_;
  SurrogateKind kind_ = SurrogateKind::MeanBased;
  std::string target_;
  std::size_t n_train_ = 20;
  std::string design_;
  ThresholdMode mode_ = ThresholdMode::Relative;
  double threshold_ = 0.05;
  double rule_c_ = 0.0;
  double rule_tau_ = 0.0;
  std::size_t scan_nodes_ = 0;
  std::size_t rejection_cap_ = 1000000;
  std::optional<std::uint64_t> design_seed_;
  std::size_t path_nodes_ = 513;
  bool fit_ = false;
  HyperparameterGrid hyper_;
  std::size_t steps_ = 20000;
  Eigen::VectorXd step_;
  std::size_t burn_in_ = 0;
  Point init_;
  std::size_t density_nodes_ = 0;
};

}  // namespace

std::unique_ptr<Experiment> make_invert(const Config& cfg) { return std::make_unique<Invert>(cfg); }

}  // namespace gpbayes::cli
