#include "gpbayes/metrics.hpp"

#include "gpbayes/errors.hpp"
#include "gpbayes/parallel.hpp"

#include <cmath>
#include <sstream>

namespace gpbayes {

namespace {

void check_values(std::span<const double> v, const char* which) {
  for (double x : v) {
    if (!(x >= 0.0)) {
      std::ostringstream os;
      os << "hellinger: density " << which << " has a negative or NaN value (" << x << ')';
      throw InvalidArgument(os.str());
    }
  }
}

std::vector<double> eval_on(const DensityFn& f, const QuadratureGrid& grid) {
  std::vector<double> out(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = f(grid.nodes[i]);
  return out;
}

}  // namespace

HellingerResult hellinger(std::span<const double> p, std::span<const double> q, const QuadratureGrid& grid) {
  if (p.size() != grid.size() || q.size() != grid.size()) {
    throw InvalidArgument("hellinger: value arrays must match the grid size");
  }
  check_values(p, "p");
  check_values(q, "q");
  HellingerResult res;
  res.mass_p = grid.integrate(p);
  res.mass_q = grid.integrate(q);
  if (!(res.mass_p > 0.0) || !(res.mass_q > 0.0)) throw InvalidArgument("hellinger: a density has zero mass on the grid");
  if (std::abs(res.mass_p - 1.0) > 1e-3 || std::abs(res.mass_q - 1.0) > 1e-3) {
    std::ostringstream os;
    os << "hellinger: renormalized densities with grid masses " << res.mass_p << " and " << res.mass_q;
    res.warning = os.str();
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double d = std::sqrt(p[i] / res.mass_p) - std::sqrt(q[i] / res.mass_q);
    acc += grid.weights[i] * d * d;
  }
  res.value = std::sqrt(0.5 * acc);
  return res;
}

HellingerResult hellinger(const DensityFn& p, const DensityFn& q, const QuadratureGrid& grid) {
  const auto pv = eval_on(p, grid);
  const auto qv = eval_on(q, grid);
  return hellinger(pv, qv, grid);
}

double hellinger_gaussian(double m1, double s1, double m2, double s2) {
  if (!(s1 > 0.0) || !(s2 > 0.0)) throw InvalidArgument("hellinger_gaussian: standard deviations must be positive");
  const double v = s1 * s1 + s2 * s2;
  const double bc = std::sqrt(2.0 * s1 * s2 / v) * std::exp(-0.25 * (m1 - m2) * (m1 - m2) / v);
  return std::sqrt(std::max(0.0, 1.0 - bc));
}

double weighted_l2_error(const std::function<double(const Point&)>& f,
                         const std::function<double(const Point&)>& approx, const DensityFn& weight,
                         const QuadratureGrid& grid) {
  double mass = 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double w = weight(grid.nodes[i]);
    if (!(w >= 0.0)) throw InvalidArgument("weighted_l2_error: negative weight density");
    const double d = f(grid.nodes[i]) - approx(grid.nodes[i]);
    mass += grid.weights[i] * w;
    acc += grid.weights[i] * w * d * d;
  }
  if (!(mass > 0.0)) throw InvalidArgument("weighted_l2_error: weight has zero mass on the grid");
  return std::sqrt(acc / mass);
}

QuadratureGrid gaussian_weight_grid(double mean, double sd, std::size_t nodes) {
  if (!(sd > 0.0)) throw InvalidArgument("gaussian_weight_grid: sd must be positive");
  return trapezoid_grid(Box::interval(mean - 8.0 * sd, mean + 8.0 * sd), nodes);
}

const ErrorCell& ErrorReport::at(std::size_t measure_index, std::size_t n_index) const {
  return cells.at(measure_index * n_count + n_index);
}

double design_squared_error(const GPPrior& prior, const Design& design, const std::function<double(const Point&)>& f,
                            const WeightSpec& weight, std::span<const double> f_on_grid,
                            std::span<const double> normalized_weights) {
  Observations obs(static_cast<Eigen::Index>(design.size()));
  for (std::size_t i = 0; i < design.size(); ++i) obs[static_cast<Eigen::Index>(i)] = f(design[i]);
  const GPPosterior gp = GPPosterior::fit(prior, design, std::move(obs), 0.0);
  const Eigen::VectorXd m = gp.predict_mean(weight.grid.nodes);
  double acc = 0.0;
  for (std::size_t i = 0; i < weight.grid.size(); ++i) {
    const double d = m[static_cast<Eigen::Index>(i)] - f_on_grid[i];
    acc += normalized_weights[i] * d * d;
  }
  return acc;
}

ErrorReport design_error_study(const std::function<double(const Point&)>& f, const std::string& f_name,
                               const GPPrior& prior, const WeightSpec& weight,
                               const std::vector<DesignMeasure>& measures, const std::vector<double>& measure_params,
                               const DesignErrorOptions& options) {
  if (measures.empty() || measures.size() != measure_params.size()) {
    throw InvalidArgument("design_error_study: need one parameter value per design measure");
  }
  if (options.n_list.empty()) throw InvalidArgument("design_error_study: empty N list");
  if (options.replications == 0) throw InvalidArgument("design_error_study: need at least one replication");
  for (std::size_t n : options.n_list) {
    if (n == 0) throw InvalidArgument("design_error_study: N must be positive");
  }

  const QuadratureGrid& grid = weight.grid;
  std::vector<double> f_grid(grid.size());
  std::vector<double> w(grid.size());
  double mass = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    f_grid[i] = f(grid.nodes[i]);
    w[i] = grid.weights[i] * weight.density(grid.nodes[i]);
    if (!(w[i] >= 0.0)) throw InvalidArgument("design_error_study: negative weight density");
    mass += w[i];
  }
  if (!(mass > 0.0)) throw InvalidArgument("design_error_study: weight has zero mass on its grid");
  for (double& x : w) x /= mass;

  const std::size_t nm = measures.size();
  const std::size_t nn = options.n_list.size();
  const std::size_t reps = options.replications;
  std::vector<double> values(nm * nn * reps);
  std::vector<std::size_t> resamples(nm * nn * reps, 0);

  parallel_for(values.size(), options.threads, [&](std::size_t job) {
    const std::size_t cell = job / reps;
    const std::size_t mi = cell / nn;
    const std::size_t ni = cell % nn;
    Rng rng = make_rng(stream_seed(options.seed, job));
    for (std::size_t attempt = 0;; ++attempt) {
      const Design design = sample_design(measures[mi], options.n_list[ni], rng);
      try {
        values[job] = design_squared_error(prior, design, f, weight, f_grid, w);
        return;
      } catch (const IllConditionedKernel&) {
        if (attempt + 1 >= options.max_resample_attempts) throw;
        ++resamples[job];
      }
    }
  });

  ErrorReport report;
  report.kernel = std::string(to_string(prior.kernel.family())) + "(lengthscale=" +
                  std::to_string(prior.kernel.lengthscale()) + ", variance=" + std::to_string(prior.kernel.variance()) +
                  ")";
  report.target = f_name;
  report.weight = weight.description;
  report.seed = options.seed;
  report.n_count = nn;
  const double rd = static_cast<double>(reps);
  for (std::size_t mi = 0; mi < nm; ++mi) {
    for (std::size_t ni = 0; ni < nn; ++ni) {
      const std::size_t base = (mi * nn + ni) * reps;
      ErrorCell c;
      c.n = options.n_list[ni];
      c.measure_param = measure_params[mi];
      c.replications = reps;
      // Fixed summation order keeps the estimate independent of the thread count.
      double sum = 0.0;
      for (std::size_t r = 0; r < reps; ++r) {
        sum += values[base + r];
        c.resamples += resamples[base + r];
      }
      c.e = sum / rd;
      double ss = 0.0;
      for (std::size_t r = 0; r < reps; ++r) ss += (values[base + r] - c.e) * (values[base + r] - c.e);
      c.std_error = reps > 1 ? std::sqrt(ss / (rd - 1.0) / rd) : 0.0;
      if (static_cast<double>(c.resamples) > 0.1 * rd) {
        std::ostringstream os;
        os << "N=" << c.n << " measure_param=" << c.measure_param << ": " << c.resamples << " resampled designs out of "
           << reps << " replications";
        report.warnings.push_back(os.str());
      }
      report.cells.push_back(c);
    }
  }
  return report;
}

}  // namespace gpbayes
