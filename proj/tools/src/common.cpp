#include "common.hpp"

#include <cmath>

namespace gpbayes::cli {

KernelSpec read_kernel(const Config& cfg, const std::string& section, const std::string& default_family,
                       double default_lengthscale, double default_variance) {
  const std::string family = cfg.get_string(section, "family", default_family);
  KernelFamily fam{};
  try {
    fam = parse_kernel_family(family);
  } catch (const InvalidArgument&) {
    throw cfg.error(section, "family", "unknown kernel family '" + family + "' (matern12, matern32, matern52, sqexp)");
  }
  const double l = cfg.get_positive(section, "lengthscale", default_lengthscale);
  const double v = cfg.get_positive(section, "variance", default_variance);
  return KernelSpec(fam, l, v);
}

HyperparameterGrid read_hyper_grid(const Config& cfg, const std::string& section) {
  HyperparameterGrid g;
  g.lengthscale_min = cfg.get_positive(section, "fit_lengthscale_min", g.lengthscale_min);
  g.lengthscale_max = cfg.get_positive(section, "fit_lengthscale_max", g.lengthscale_max);
  g.variance_min = cfg.get_positive(section, "fit_variance_min", g.variance_min);
  g.variance_max = cfg.get_positive(section, "fit_variance_max", g.variance_max);
  g.points = cfg.get_size(section, "fit_grid_points", g.points);
  if (g.lengthscale_min >= g.lengthscale_max) throw cfg.error(section, "fit_lengthscale_max", "must exceed fit_lengthscale_min");
  if (g.variance_min >= g.variance_max) throw cfg.error(section, "fit_variance_max", "must exceed fit_variance_min");
  if (g.points < 2) throw cfg.error(section, "fit_grid_points", "need at least 2 points");
  return g;
}

std::function<double(double)> scalar_function(const Config& cfg, const std::string& section, const std::string& key,
                                              const std::string& fallback) {
  const std::string name = cfg.get_string(section, key, fallback);
  if (name == "linear") return [](double x) { return x; };
  if (name == "square") return [](double x) { return x * x; };
  if (name == "cube") return [](double x) { return x * x * x; };
  if (name == "sin") return [](double x) { return std::sin(x); };
  if (name == "exp") return [](double x) { return std::exp(x); };
  if (name == "sin_shift_sq") return [](double x) { return std::sin((x - 2.5) * (x - 2.5)); };
  throw cfg.error(section, key, "unknown function '" + name + "' (linear, square, cube, sin, exp, sin_shift_sq)");
}

DarcyModel read_darcy(const Config& cfg, const std::string& section) {
  DarcyModel m;
  m.breakpoints = cfg.get_doubles(section, "breakpoints", std::vector<double>{0.5});
  m.observation_points = cfg.get_doubles(section, "observation_points", std::vector<double>{0.25, 0.5, 0.75});
  m.cells = cfg.get_size(section, "cells", 128);
  m.left_pressure = cfg.get_double(section, "left_pressure", 0.0);
  m.right_pressure = cfg.get_double(section, "right_pressure", 1.0);
  const double g = cfg.get_double(section, "source", 0.0);
  m.source = [g](double) { return g; };
  try {
    m.validate();
  } catch (const InvalidArgument& e) {
    throw cfg.error(section, "breakpoints", e.what());
  }
  return m;
}

Eigen::VectorXd to_vector(const std::vector<double>& xs) {
  return Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

Eigen::VectorXd read_vector(const Config& cfg, const std::string& section, const std::string& key, int dim,
                            std::optional<std::vector<double>> fallback) {
  const auto xs = cfg.get_doubles(section, key, std::move(fallback));
  if (xs.size() == 1 && dim > 1) return Eigen::VectorXd::Constant(dim, xs[0]);
  if (static_cast<int>(xs.size()) != dim) {
    throw cfg.error(section, key, "expected " + std::to_string(dim) + " values, got " + std::to_string(xs.size()));
  }
  return to_vector(xs);
}

}  // namespace gpbayes::cli
