#pragma once

#include "config.hpp"
#include "output.hpp"

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace gpbayes::cli {

struct RunOptions {
  std::uint64_t seed = 0;
  int threads = 1;
};

/// One experiment kind. Construction reads and validates every config key it uses, so after
/// construction the config can be checked for unknown keys and hashed.
class Experiment {
 public:
  virtual ~Experiment() = default;
  virtual void run(OutputDir& out, const RunOptions& options) = 0;
};

/// Kinds accepted by `[experiment] kind`.
const std::vector<std::string>& experiment_kinds();

/// Throws ConfigError for an unknown kind or invalid parameters.
std::unique_ptr<Experiment> make_experiment(const std::string& kind, const Config& cfg);

std::unique_ptr<Experiment> make_sample_paths(const Config& cfg);
std::unique_ptr<Experiment> make_regress(const Config& cfg);
std::unique_ptr<Experiment> make_invert(const Config& cfg);
std::unique_ptr<Experiment> make_design_study_gaussian(const Config& cfg);
std::unique_ptr<Experiment> make_design_study_uniform(const Config& cfg);
std::unique_ptr<Experiment> make_design_study_fill(const Config& cfg);
std::unique_ptr<Experiment> make_hellinger_convergence(const Config& cfg);
std::unique_ptr<Experiment> make_darcy_demo(const Config& cfg);

}  // namespace gpbayes::cli
