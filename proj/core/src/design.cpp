#include "gpbayes/design.hpp"

#include "gpbayes/errors.hpp"
#include "gpbayes/parallel.hpp"
#include "gpbayes/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <sstream>

namespace gpbayes {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Points of a regular grid over a box, `res` per dimension, endpoints included.
PointSet scan_grid(const Box& box, std::size_t res) {
  const int d = box.dim();
  if (d < 1 || d > 2) throw InvalidArgument("grid scans are limited to d <= 2");
  if (res < 2) throw InvalidArgument("scan resolution must be at least 2");
  PointSet pts;
  auto coord = [&](int j, std::size_t i) {
    return box.lower[j] + (box.upper[j] - box.lower[j]) * static_cast<double>(i) / static_cast<double>(res - 1);
  };
  if (d == 1) {
    pts.reserve(res);
    for (std::size_t i = 0; i < res; ++i) pts.push_back(point1(coord(0, i)));
  } else {
    pts.reserve(res * res);
    for (std::size_t i = 0; i < res; ++i) {
      for (std::size_t k = 0; k < res; ++k) pts.push_back(point2(coord(0, i), coord(1, k)));
    }
  }
  return pts;
}

double quantile_sorted(const std::vector<double>& sorted, double q) {
  if (sorted.empty()) return 0.0;
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double t = pos - static_cast<double>(lo);
  return (1.0 - t) * sorted[lo] + t * sorted[hi];
}

// Exact 1-D fill distance over a union of disjoint intervals.
double fill_distance_1d(const Design& design, const std::vector<std::pair<double, double>>& intervals) {
  auto inside = [&](double x) {
    return std::any_of(intervals.begin(), intervals.end(),
                       [x](const auto& iv) { return x >= iv.first && x <= iv.second; });
  };
  std::vector<double> xs;
  for (const auto& p : design) {
    if (inside(p[0])) xs.push_back(p[0]);
  }
  if (xs.empty()) return kInf;
  std::sort(xs.begin(), xs.end());
  auto nearest = [&](double u) {
    auto it = std::lower_bound(xs.begin(), xs.end(), u);
    double best = kInf;
    if (it != xs.end()) best = *it - u;
    if (it != xs.begin()) best = std::min(best, u - *std::prev(it));
    return best;
  };
  // The distance to the design is piecewise linear; on each interval its maximum sits at
  // an endpoint or at a midpoint of consecutive design points.
  double h = 0.0;
  for (const auto& [a, b] : intervals) {
    h = std::max({h, nearest(a), nearest(b)});
    for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
      const double mid = 0.5 * (xs[i] + xs[i + 1]);
      if (mid > a && mid < b) h = std::max(h, nearest(mid));
    }
  }
  return h;
}

// Nearest-neighbour distances from grid candidates in 2-D via a uniform cell list.
class CellList {
 public:
  CellList(const Design& pts, const Box& box) : box_(box) {
    const double w = box.upper[0] - box.lower[0];
    const double hgt = box.upper[1] - box.lower[1];
    const double target = std::sqrt(w * hgt / static_cast<double>(std::max<std::size_t>(pts.size(), 1)));
    nx_ = std::clamp<long>(static_cast<long>(std::ceil(w / target)), 1, 4096);
    ny_ = std::clamp<long>(static_cast<long>(std::ceil(hgt / target)), 1, 4096);
    cw_ = w / static_cast<double>(nx_);
    ch_ = hgt / static_cast<double>(ny_);
    cells_.assign(static_cast<std::size_t>(nx_ * ny_), {});
    for (const auto& p : pts) {
      cells_[static_cast<std::size_t>(cell_x(p[0]) * ny_ + cell_y(p[1]))].push_back({p[0], p[1]});
    }
  }

  [[nodiscard]] double nearest(double x, double y) const {
    const long cx = cell_x(x);
    const long cy = cell_y(y);
    const double ring_step = std::min(cw_, ch_);
    double best2 = kInf;
    for (long r = 0;; ++r) {
      // Everything in ring r + 1 or beyond is at least r * ring_step away.
      if (r > 0) {
        const double bound = static_cast<double>(r - 1) * ring_step;
        if (best2 <= bound * bound) break;
      }
      if (r > nx_ + ny_) break;
      for (long i = cx - r; i <= cx + r; ++i) {
        for (long j = cy - r; j <= cy + r; ++j) {
          if (std::max(std::labs(i - cx), std::labs(j - cy)) != r) continue;
          if (i < 0 || j < 0 || i >= nx_ || j >= ny_) continue;
          for (const auto& [px, py] : cells_[static_cast<std::size_t>(i * ny_ + j)]) {
            const double dx = px - x;
            const double dy = py - y;
            best2 = std::min(best2, dx * dx + dy * dy);
          }
        }
      }
    }
    return std::sqrt(best2);
  }

 private:
  long cell_x(double x) const {
    return std::clamp<long>(static_cast<long>((x - box_.lower[0]) / cw_), 0, nx_ - 1);
  }
  long cell_y(double y) const {
    return std::clamp<long>(static_cast<long>((y - box_.lower[1]) / ch_), 0, ny_ - 1);
  }

  Box box_;
  long nx_ = 1;
  long ny_ = 1;
  double cw_ = 1.0;
  double ch_ = 1.0;
  std::vector<std::vector<std::pair<double, double>>> cells_;
};

double fill_distance_grid(const Design& design, const Box& box, const std::function<bool(const Point&)>& in_region,
                          std::size_t res) {
  if (box.dim() != 2) throw InvalidArgument("fill_distance: grid method is implemented for d = 2");
  if (res < 2) throw InvalidArgument("fill_distance: resolution must be at least 2");
  Design inside;
  for (const auto& p : design) {
    if (p.size() != 2) throw InvalidArgument("fill_distance: design dimension does not match the region");
    if (in_region(p)) inside.push_back(p);
  }
  if (inside.empty()) return kInf;
  const CellList cells(inside, box);
  double h = 0.0;
  Point u(2);
  for (std::size_t i = 0; i < res; ++i) {
    const double x = box.lower[0] + (box.upper[0] - box.lower[0]) * static_cast<double>(i) / static_cast<double>(res - 1);
    for (std::size_t k = 0; k < res; ++k) {
      const double y =
          box.lower[1] + (box.upper[1] - box.lower[1]) * static_cast<double>(k) / static_cast<double>(res - 1);
      u[0] = x;
      u[1] = y;
      if (!in_region(u)) continue;
      h = std::max(h, cells.nearest(x, y));
    }
  }
  return h;
}

}  // namespace

// --- measures ---------------------------------------------------------------

DesignMeasure DesignMeasure::gaussian(Eigen::VectorXd center, Eigen::VectorXd sd) {
  if (center.size() == 0 || center.size() != sd.size()) {
    throw InvalidArgument("DesignMeasure::gaussian: center and sd must be non-empty and of equal length");
  }
  if (!(sd.array() > 0.0).all()) throw InvalidArgument("DesignMeasure::gaussian: sd must be positive");
  const int d = static_cast<int>(center.size());
  return DesignMeasure(GaussianDesign{std::move(center), std::move(sd)}, d);
}

DesignMeasure DesignMeasure::gaussian1(double center, double sd) { return gaussian(point1(center), point1(sd)); }

DesignMeasure DesignMeasure::uniform(Box box) {
  const int d = box.dim();
  if (d == 0) throw InvalidArgument("DesignMeasure::uniform: empty box");
  return DesignMeasure(UniformDesign{std::move(box)}, d);
}

DesignMeasure DesignMeasure::truncated(DensityFn reference, double threshold, Box proposal_box,
                                       std::size_t rejection_cap) {
  if (!reference) throw InvalidArgument("DesignMeasure::truncated: empty reference density");
  if (!(threshold >= 0.0)) throw InvalidArgument("DesignMeasure::truncated: threshold must be non-negative");
  if (rejection_cap == 0) throw InvalidArgument("DesignMeasure::truncated: rejection cap must be positive");
  const int d = proposal_box.dim();
  if (d == 0) throw InvalidArgument("DesignMeasure::truncated: empty proposal box");
  return DesignMeasure(TruncatedDesign{std::move(reference), threshold, std::move(proposal_box), rejection_cap}, d);
}

std::string DesignMeasure::description() const {
  std::ostringstream os;
  os.precision(6);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GaussianDesign>) {
          os << "gaussian(center=" << m.center.transpose() << ", sd=" << m.sd.transpose() << ')';
        } else if constexpr (std::is_same_v<T, UniformDesign>) {
          os << "uniform(lower=" << m.box.lower.transpose() << ", upper=" << m.box.upper.transpose() << ')';
        } else {
          os << "truncated(threshold=" << m.threshold << ')';
        }
      },
      variant_);
  return os.str();
}

double DesignMeasure::density(const Point& u) const {
  if (u.size() != dim_) throw InvalidArgument("DesignMeasure::density: dimension mismatch");
  return std::visit(
      [&](const auto& m) -> double {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GaussianDesign>) {
          double lp = 0.0;
          for (int j = 0; j < dim_; ++j) {
            const double z = (u[j] - m.center[j]) / m.sd[j];
            lp += -0.5 * z * z - std::log(m.sd[j]) - 0.5 * std::log(2.0 * std::numbers::pi);
          }
          return std::exp(lp);
        } else if constexpr (std::is_same_v<T, UniformDesign>) {
          return m.box.contains(u) ? 1.0 / m.box.volume() : 0.0;
        } else {
          if (!m.proposal_box.contains(u) || !(m.reference(u) > m.threshold)) return 0.0;
          std::call_once(volume_cache_->once, [&] {
            const QuadratureGrid grid = trapezoid_grid(m.proposal_box);
            volume_cache_->volume = grid.integrate([&](const Point& v) { return m.reference(v) > m.threshold ? 1.0 : 0.0; });
          });
          if (!(volume_cache_->volume > 0.0)) {
            throw EmptyRegion("DesignMeasure::density: truncated region has zero volume on the scan grid");
          }
          return 1.0 / volume_cache_->volume;
        }
      },
      variant_);
}

Design sample_design(const DesignMeasure& measure, std::size_t n, Rng& rng) {
  if (n == 0) throw InvalidArgument("sample_design: n must be at least 1");
  const int d = measure.dim();
  Design out;
  out.reserve(n);
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GaussianDesign>) {
          std::normal_distribution<double> normal(0.0, 1.0);
          for (std::size_t i = 0; i < n; ++i) {
            Point p(d);
            for (int j = 0; j < d; ++j) p[j] = m.center[j] + m.sd[j] * normal(rng);
            out.push_back(std::move(p));
          }
        } else {
          const Box& box = [&]() -> const Box& {
            if constexpr (std::is_same_v<T, UniformDesign>) {
              return m.box;
            } else {
              return m.proposal_box;
            }
          }();
          std::uniform_real_distribution<double> unif(0.0, 1.0);
          auto draw = [&] {
            Point p(d);
            for (int j = 0; j < d; ++j) p[j] = box.lower[j] + (box.upper[j] - box.lower[j]) * unif(rng);
            return p;
          };
          if constexpr (std::is_same_v<T, UniformDesign>) {
            for (std::size_t i = 0; i < n; ++i) out.push_back(draw());
          } else {
            std::size_t attempts = 0;
            while (out.size() < n) {
              if (attempts >= m.rejection_cap) {
                const double rate = static_cast<double>(out.size()) / static_cast<double>(attempts);
                std::ostringstream os;
                os << "sample_design: rejection cap of " << m.rejection_cap << " attempts reached with "
                   << out.size() << " of " << n << " points accepted (acceptance rate " << rate
                   << "); the threshold " << m.threshold << " is probably too high";
                throw RejectionCapExceeded(os.str(), rate);
              }
              ++attempts;
              Point p = draw();
              if (m.reference(p) > m.threshold) out.push_back(std::move(p));
            }
          }
        }
      },
      measure.variant());
  return out;
}

Design sample_design(const DesignMeasure& measure, std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  return sample_design(measure, n, rng);
}

// --- truncation regions -----------------------------------------------------

bool TruncationRegion::contains(const Point& u) const { return scan_box.contains(u) && density(u) > threshold; }

double TruncationRegion::measure_1d() const {
  double total = 0.0;
  for (const auto& [a, b] : intervals) total += b - a;
  return total;
}

TruncationRegion truncation_region(DensityFn density, double threshold, Box scan_box, std::size_t resolution) {
  if (!density) throw InvalidArgument("truncation_region: empty density");
  if (!(threshold >= 0.0)) throw InvalidArgument("truncation_region: threshold must be non-negative");
  TruncationRegion region{std::move(density), threshold, std::move(scan_box), {}};
  const PointSet grid = scan_grid(region.scan_box, resolution);
  std::vector<char> above(grid.size());
  std::size_t count = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    above[i] = region.density(grid[i]) > threshold ? 1 : 0;
    count += static_cast<std::size_t>(above[i]);
  }
  if (count == 0) {
    std::ostringstream os;
    os << "truncation_region: no scan point has density above " << threshold;
    throw EmptyRegion(os.str());
  }
  if (region.dim() != 1) return region;

  // Bisect between an inside node and an outside node to 1e-8.
  auto refine = [&](double in, double out) {
    while (std::abs(out - in) > 1e-8) {
      const double mid = 0.5 * (in + out);
      if (region.density(point1(mid)) > threshold) {
        in = mid;
      } else {
        out = mid;
      }
    }
    return in;
  };
  const std::size_t n = grid.size();
  std::size_t i = 0;
  while (i < n) {
    if (!above[i]) {
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j + 1 < n && above[j + 1]) ++j;
    const double a = i == 0 ? grid[0][0] : refine(grid[i][0], grid[i - 1][0]);
    const double b = j == n - 1 ? grid[n - 1][0] : refine(grid[j][0], grid[j + 1][0]);
    region.intervals.emplace_back(a, b);
    i = j + 1;
  }
  return region;
}

double threshold_rule(double c, double tau, std::size_t n, int dim) {
  if (!(c >= 0.0) || !(tau >= 0.0) || n == 0 || dim < 1) {
    throw InvalidArgument("threshold_rule: need c >= 0, tau >= 0, N >= 1, d >= 1");
  }
  return c * std::pow(static_cast<double>(n), -2.0 * tau / static_cast<double>(dim));
}

// --- fill distance ----------------------------------------------------------

FillDistance fill_distance(const Design& design, const FillRegion& region, std::size_t resolution) {
  FillDistance out;
  if (const auto* box = std::get_if<Box>(&region)) {
    if (box->dim() == 1) {
      for (const auto& p : design) {
        if (p.size() != 1) throw InvalidArgument("fill_distance: design dimension does not match the region");
      }
      out.value = fill_distance_1d(design, {{box->lower[0], box->upper[0]}});
      out.method = "exact-1d";
    } else {
      out.value = fill_distance_grid(design, *box, [&](const Point& u) { return box->contains(u); }, resolution);
      out.method = "grid";
    }
    return out;
  }
  const auto& tr = std::get<TruncationRegion>(region);
  if (tr.dim() == 1) {
    out.value = fill_distance_1d(design, tr.intervals);
    out.method = "exact-1d";
  } else {
    out.value = fill_distance_grid(design, tr.scan_box, [&](const Point& u) { return tr.contains(u); }, resolution);
    out.method = "grid";
  }
  return out;
}

double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("least_squares_slope: need >= 2 paired values");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0;
  double sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("least_squares_slope: x values are all equal");
  return sxy / sxx;
}

FillDecayResult fill_decay_study(const DesignMeasure& measure, const FillRegion& region,
                                 const FillDecayOptions& options) {
  const auto& ns = options.n_list;
  const std::size_t reps = options.replications;
  if (ns.size() < 2) throw InvalidArgument("fill_decay_study: need at least two N values");
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (ns[i] == 0 || (i > 0 && ns[i] <= ns[i - 1])) {
      throw InvalidArgument("fill_decay_study: N list must be positive and strictly increasing");
    }
  }
  if (reps < 30) throw InvalidArgument("fill_decay_study: need at least 30 replications");

  FillDecayResult result;
  result.replicate_h.assign(ns.size(), std::vector<double>(reps));
  parallel_for(ns.size() * reps, options.threads, [&](std::size_t job) {
    const std::size_t i = job / reps;
    const std::size_t r = job % reps;
    Rng rng = make_rng(stream_seed(options.seed, job));
    const Design design = sample_design(measure, ns[i], rng);
    result.replicate_h[i][r] = fill_distance(design, region, options.resolution).value;
  });

  double h0 = options.tail_threshold;
  if (!(h0 > 0.0)) {
    std::vector<double> first = result.replicate_h.front();
    std::sort(first.begin(), first.end());
    h0 = quantile_sorted(first, 0.5);
  }
  result.tail_threshold = h0;

  std::vector<double> log_n;
  std::vector<double> log_h;
  const double rd = static_cast<double>(reps);
  for (std::size_t i = 0; i < ns.size(); ++i) {
    std::vector<double> hs = result.replicate_h[i];
    FillDecayRow row;
    row.n = ns[i];
    double sum = 0.0;
    double sum_sq = 0.0;
    std::size_t over = 0;
    for (double h : hs) {
      if (!std::isfinite(h)) {
        throw NumericalError("fill_decay_study: a replicate at N = " + std::to_string(ns[i]) +
                             " had no design point in the region");
      }
      sum += h;
      sum_sq += h * h;
      if (h > h0) ++over;
    }
    row.mean_h = sum / rd;
    row.std_error = std::sqrt(std::max(0.0, (sum_sq - rd * row.mean_h * row.mean_h) / (rd - 1.0)) / rd);
    std::sort(hs.begin(), hs.end());
    row.q10 = quantile_sorted(hs, 0.1);
    row.q90 = quantile_sorted(hs, 0.9);
    row.tail_probability = static_cast<double>(over) / rd;
    row.tail_std_error = std::sqrt(row.tail_probability * (1.0 - row.tail_probability) / rd);
    result.rows.push_back(row);
    log_n.push_back(std::log(static_cast<double>(ns[i])));
    log_h.push_back(std::log(row.mean_h));
  }
  result.slope = least_squares_slope(log_n, log_h);
  return result;
}

std::vector<PartitionCell> partition_report(const Design& design, const DensityFn& density, const Box& box,
                                            std::size_t cells_per_dim, std::size_t resolution_per_cell) {
  const int d = box.dim();
  if (d < 1 || d > 2) throw InvalidArgument("partition_report: d must be 1 or 2");
  if (cells_per_dim == 0) throw InvalidArgument("partition_report: need at least one cell per dimension");
  const Eigen::VectorXd width = (box.upper - box.lower) / static_cast<double>(cells_per_dim);
  std::vector<PartitionCell> out;
  const std::size_t total = d == 1 ? cells_per_dim : cells_per_dim * cells_per_dim;
  for (std::size_t c = 0; c < total; ++c) {
    Eigen::VectorXd lo(d);
    lo[0] = box.lower[0] + width[0] * static_cast<double>(d == 1 ? c : c / cells_per_dim);
    if (d == 2) lo[1] = box.lower[1] + width[1] * static_cast<double>(c % cells_per_dim);
    PartitionCell cell{Box(lo, lo + width), 0.0, 0, kInf};
    for (const auto& u : scan_grid(cell.cell, resolution_per_cell)) cell.sup_density = std::max(cell.sup_density, density(u));
    Design inside;
    for (const auto& p : design) {
      if (cell.cell.contains(p)) inside.push_back(p);
    }
    cell.design_points = inside.size();
    cell.fill_distance = fill_distance(inside, cell.cell, resolution_per_cell).value;
    out.push_back(std::move(cell));
  }
  return out;
}

}  // namespace gpbayes
