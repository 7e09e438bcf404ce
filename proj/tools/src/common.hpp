#pragma once

#include "config.hpp"

#include "gpbayes/bayes.hpp"
#include "gpbayes/darcy.hpp"
#include "gpbayes/gp.hpp"
#include "gpbayes/kernels.hpp"

#include <functional>
#include <string>

namespace gpbayes::cli {

/// Reads `family`, `lengthscale`, `variance` from a section.
KernelSpec read_kernel(const Config& cfg, const std::string& section, const std::string& default_family,
                       double default_lengthscale, double default_variance);

/// Reads optional hyperparameter search bounds (`fit_*` keys).
HyperparameterGrid read_hyper_grid(const Config& cfg, const std::string& section);

/// Named scalar test functions: linear, square, cube, sin, exp, sin_shift_sq (sin((x-2.5)^2)).
std::function<double(double)> scalar_function(const Config& cfg, const std::string& section, const std::string& key,
                                              const std::string& fallback);

/// Darcy1D model from a section (breakpoints, observation_points, cells, pressures, source).
DarcyModel read_darcy(const Config& cfg, const std::string& section);

Eigen::VectorXd to_vector(const std::vector<double>& xs);

/// `values` of length `dim`, or a single value broadcast to `dim`.
Eigen::VectorXd read_vector(const Config& cfg, const std::string& section, const std::string& key, int dim,
                            std::optional<std::vector<double>> fallback = std::nullopt);

}  // namespace gpbayes::cli
