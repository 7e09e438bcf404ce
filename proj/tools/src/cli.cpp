#include "cli.hpp"

#include "config.hpp"
#include "experiments.hpp"
#include "output.hpp"

#include "gpbayes/errors.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <ostream>

#ifndef GPBAYES_VERSION
#define GPBAYES_VERSION "0.1.0"
#endif

namespace gpbayes::cli {

const char* version() { return GPBAYES_VERSION; }

const std::vector<std::string>& experiment_kinds() {
  static const std::vector<std::string> kinds{"sample-paths",          "regress",
                                              "invert",                "design-study-gaussian",
                                              "design-study-uniform",  "design-study",
                                              "hellinger-convergence", "darcy-demo"};
  return kinds;
}

std::unique_ptr<Experiment> make_experiment(const std::string& kind, const Config& cfg) {
  if (kind == "sample-paths") return make_sample_paths(cfg);
  if (kind == "regress") return make_regress(cfg);
  if (kind == "invert") return make_invert(cfg);
  if (kind == "design-study-gaussian") return make_design_study_gaussian(cfg);
  if (kind == "design-study-uniform") return make_design_study_uniform(cfg);
  if (kind == "design-study") return make_design_study_fill(cfg);
  if (kind == "hellinger-convergence") return make_hellinger_convergence(cfg);
  if (kind == "darcy-demo") return make_darcy_demo(cfg);
  std::string known;
  for (const auto& k : experiment_kinds()) known += (known.empty() ? "" : ", ") + k;
  throw cfg.error("experiment", "kind", "unknown experiment kind '" + kind + "' (" + known + ")");
}

namespace {

struct Invocation {
  std::string config_flag;
  std::string config_positional;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 1;
};

void add_run_options(CLI::App* app, Invocation& inv) {
  app->add_option("file", inv.config_positional, "Experiment config file (same as --config)");
  app->add_option("-c,--config", inv.config_flag, "Experiment config file");
  app->add_option("-o,--out", inv.out_dir, "Output directory (default: out/<kind>)");
  app->add_option("-s,--seed", inv.seed, "Master seed; overrides [experiment] seed");
  app->add_option("-t,--threads", inv.threads, "Worker threads for replication loops")->check(CLI::Range(1, 256));
}

int execute(const Invocation& inv, const std::string& forced_kind, std::ostream& out, std::ostream& err) {
  try {
    if (!inv.config_flag.empty() && !inv.config_positional.empty() && inv.config_flag != inv.config_positional) {
      throw ConfigError("config given twice ('" + inv.config_positional + "' and '" + inv.config_flag + "')", "", 0);
    }
    const std::string path = inv.config_flag.empty() ? inv.config_positional : inv.config_flag;
    if (path.empty()) throw ConfigError("no config file given (use --config <path>)", "", 0);
    Config cfg = Config::load(path);

    if (inv.seed) cfg.set("experiment", "seed", std::to_string(*inv.seed));
    std::string kind;
    if (forced_kind.empty()) {
      kind = cfg.get_string("experiment", "kind");
    } else {
      kind = cfg.get_string("experiment", "kind", forced_kind);
      if (kind != forced_kind) {
        throw cfg.error("experiment", "kind", "config is for '" + kind + "' but the subcommand is '" + forced_kind + "'");
      }
    }
    RunOptions options;
    options.seed = cfg.get_u64("experiment", "seed", 0);
    options.threads = inv.threads;

    auto experiment = make_experiment(kind, cfg);
    cfg.reject_unknown();

    const std::string resolved = cfg.resolved_text();
    RunInfo info{kind, options.seed, version(), fnv1a_hex(resolved)};
    const std::filesystem::path dir = inv.out_dir.empty() ? std::filesystem::path("out") / kind : std::filesystem::path(inv.out_dir);
    OutputDir output(dir, info);
    output.text("resolved.cfg", resolved);
    experiment->run(output, options);

    out << kind << ": wrote " << output.written().size() << " files to " << dir.string() << '\n';
    return kExitOk;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const InvalidArgument& e) {
    err << "error: invalid argument: " << e.what() << '\n';
    return kExitValidation;
  } catch (const IllConditionedKernel& e) {
    err << "error: numerical failure: " << e.what() << " (min eigenvalue " << e.min_eigenvalue() << ")\n";
    return kExitNumerical;
  } catch (const NumericalError& e) {
    err << "error: numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitInternal;
  }
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Gaussian-process surrogates for Bayesian inverse problems: experiment driver", "gpbayes"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);

  Invocation run_inv;
  auto* run = app.add_subcommand("run", "Run the experiment named by [experiment] kind");
  add_run_options(run, run_inv);

  auto* kinds = app.add_subcommand("kinds", "List experiment kinds");

  std::vector<Invocation> per_kind(experiment_kinds().size());
  std::vector<CLI::App*> subs;
  for (std::size_t i = 0; i < experiment_kinds().size(); ++i) {
    auto* sub = app.add_subcommand(experiment_kinds()[i], "Run a " + experiment_kinds()[i] + " experiment");
    add_run_options(sub, per_kind[i]);
    subs.push_back(sub);
  }

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion& e) {
    out << version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  if (kinds->parsed()) {
    for (const auto& k : experiment_kinds()) out << k << '\n';
    return kExitOk;
  }
  if (run->parsed()) return execute(run_inv, "", out, err);
  for (std::size_t i = 0; i < subs.size(); ++i) {
    if (subs[i]->parsed()) return execute(per_kind[i], experiment_kinds()[i], out, err);
  }
  err << "error: no subcommand\n";
  return kExitValidation;
}

}  // namespace gpbayes::cli
