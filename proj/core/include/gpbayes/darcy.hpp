#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <vector>

namespace gpbayes {

/// One-dimensional Darcy flow -(k(x) p'(x))' = g(x) on (0, 1) with Dirichlet ends and a
/// layered permeability k(x; u) = sum_j u_j 1{x in D_j}.
struct DarcyModel {
  /// Interior layer breakpoints, strictly increasing in (0, 1); d_u = breakpoints.size() + 1.
  std::vector<double> breakpoints;
  std::function<double(double)> source = [](double) { return 0.0; };
  double left_pressure = 0.0;
  double right_pressure = 1.0;
  /// Observation locations, interior to (0, 1); d_y = observation_points.size().
  std::vector<double> observation_points;
  /// Number of finite-difference cells (nodes = cells + 1).
  std::size_t cells = 128;

  [[nodiscard]] std::size_t parameter_dim() const { return breakpoints.size() + 1; }
  [[nodiscard]] std::size_t observation_dim() const { return observation_points.size(); }

  /// Throws InvalidArgument on malformed geometry.
  void validate() const;
};

struct DarcySolution {
  Eigen::VectorXd nodes;      // x_0 = 0, ..., x_M = 1
  Eigen::VectorXd pressure;   // p at nodes
  Eigen::VectorXd face_permeability;  // harmonic mean of k over each cell [x_i, x_{i+1}]
  Eigen::VectorXd observations;       // p interpolated linearly at the observation points

  /// Discrete flux -k_{i+1/2} (p_{i+1} - p_i) / h for each cell.
  [[nodiscard]] Eigen::VectorXd fluxes() const;
};

/// Conservative three-point scheme; k on each cell is the exact harmonic average of the
/// layered permeability over that cell, so layer interfaces on nodes are resolved exactly.
/// Throws InvalidArgument for non-positive permeability or wrong parameter length, and
/// NumericalError if the tridiagonal system is singular.
DarcySolution solve_darcy(const DarcyModel& model, const Eigen::VectorXd& permeability);

}  // namespace gpbayes
