#include "gpbayes/darcy.hpp"

#include "gpbayes/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gpbayes {

void DarcyModel::validate() const {
  if (cells < 8) throw InvalidArgument("DarcyModel: need at least 8 finite-difference cells");
  double prev = 0.0;
  for (double b : breakpoints) {
    if (!(b > prev) || !(b < 1.0)) {
      throw InvalidArgument("DarcyModel: breakpoints must be strictly increasing inside (0, 1)");
    }
    prev = b;
  }
  for (double x : observation_points) {
    if (!(x > 0.0) || !(x < 1.0)) throw InvalidArgument("DarcyModel: observation points must lie in (0, 1)");
  }
  if (!source) throw InvalidArgument("DarcyModel: source term is empty");
}

Eigen::VectorXd DarcySolution::fluxes() const {
  const Eigen::Index m = pressure.size() - 1;
  Eigen::VectorXd q(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double h = nodes[i + 1] - nodes[i];
    q[i] = -face_permeability[i] * (pressure[i + 1] - pressure[i]) / h;
  }
  return q;
}

namespace {

// Exact harmonic average of the layered permeability over [a, b]:
// (b - a) / integral_a^b dx / k(x).
double harmonic_average(double a, double b, const std::vector<double>& breakpoints, const Eigen::VectorXd& u) {
  double resistance = 0.0;
  double left = a;
  std::size_t layer =
      static_cast<std::size_t>(std::upper_bound(breakpoints.begin(), breakpoints.end(), a) - breakpoints.begin());
  while (left < b) {
    const double layer_end = layer < breakpoints.size() ? breakpoints[layer] : 1.0;
    const double right = std::min(b, layer_end);
    resistance += (right - left) / u[static_cast<Eigen::Index>(layer)];
    left = right;
    ++layer;
    if (layer > breakpoints.size()) break;
  }
  return (b - a) / resistance;
}

}  // namespace

DarcySolution solve_darcy(const DarcyModel& model, const Eigen::VectorXd& permeability) {
  model.validate();
  if (static_cast<std::size_t>(permeability.size()) != model.parameter_dim()) {
    throw InvalidArgument("solve_darcy: expected " + std::to_string(model.parameter_dim()) +
                          " permeability values, got " + std::to_string(permeability.size()));
  }
  for (Eigen::Index j = 0; j < permeability.size(); ++j) {
    if (!(permeability[j] > 0.0) || !std::isfinite(permeability[j])) {
      throw InvalidArgument("solve_darcy: permeability values must be positive and finite");
    }
  }

  const auto m = static_cast<Eigen::Index>(model.cells);
  const double h = 1.0 / static_cast<double>(m);
  DarcySolution sol;
  sol.nodes.resize(m + 1);
  for (Eigen::Index i = 0; i <= m; ++i) sol.nodes[i] = static_cast<double>(i) * h;
  sol.nodes[m] = 1.0;

  sol.face_permeability.resize(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    sol.face_permeability[i] = harmonic_average(sol.nodes[i], sol.nodes[i + 1], model.breakpoints, permeability);
  }

  // Interior unknowns p_1 .. p_{M-1}; Thomas algorithm on the scaled system
  // -k_{i-1/2} p_{i-1} + (k_{i-1/2} + k_{i+1/2}) p_i - k_{i+1/2} p_{i+1} = h^2 g(x_i).
  const Eigen::Index n = m - 1;
  Eigen::VectorXd lower(n), diag(n), upper(n), rhs(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const Eigen::Index i = r + 1;
    const double kl = sol.face_permeability[i - 1];
    const double kr = sol.face_permeability[i];
    lower[r] = -kl;
    diag[r] = kl + kr;
    upper[r] = -kr;
    rhs[r] = h * h * model.source(sol.nodes[i]);
  }
  rhs[0] += sol.face_permeability[0] * model.left_pressure;
  rhs[n - 1] += sol.face_permeability[m - 1] * model.right_pressure;

  for (Eigen::Index r = 1; r < n; ++r) {
    if (diag[r - 1] == 0.0) throw NumericalError("solve_darcy: singular finite-difference system");
    const double w = lower[r] / diag[r - 1];
    diag[r] -= w * upper[r - 1];
    rhs[r] -= w * rhs[r - 1];
  }
  if (diag[n - 1] == 0.0) throw NumericalError("solve_darcy: singular finite-difference system");

  sol.pressure.resize(m + 1);
  sol.pressure[0] = model.left_pressure;
  sol.pressure[m] = model.right_pressure;
  sol.pressure[n] = rhs[n - 1] / diag[n - 1];
  for (Eigen::Index r = n - 2; r >= 0; --r) {
    sol.pressure[r + 1] = (rhs[r] - upper[r] * sol.pressure[r + 2]) / diag[r];
  }

  sol.observations.resize(static_cast<Eigen::Index>(model.observation_points.size()));
  for (std::size_t k = 0; k < model.observation_points.size(); ++k) {
    const double x = model.observation_points[k];
    const auto i = std::min<Eigen::Index>(static_cast<Eigen::Index>(x / h), m - 1);
    const double t = (x - sol.nodes[i]) / h;
    sol.observations[static_cast<Eigen::Index>(k)] = (1.0 - t) * sol.pressure[i] + t * sol.pressure[i + 1];
  }
  return sol;
}

}  // namespace gpbayes
