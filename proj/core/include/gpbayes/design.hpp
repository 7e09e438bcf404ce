#pragma once

#include "gpbayes/gp.hpp"
#include "gpbayes/random.hpp"
#include "gpbayes/types.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace gpbayes {

using DensityFn = std::function<double(const Point&)>;

struct GaussianDesign {
  Eigen::VectorXd center;
  Eigen::VectorXd sd;
};

struct UniformDesign {
  Box box;
};

/// Uniform on {u in proposal_box : reference(u) > threshold}, sampled by rejection.
struct TruncatedDesign {
  DensityFn reference;
  double threshold = 0.0;
  Box proposal_box;
  std::size_t rejection_cap = 1000000;
};

/// Design measure nu with density rho and an i.i.d. sampler.
class DesignMeasure {
 public:
  using Variant = std::variant<GaussianDesign, UniformDesign, TruncatedDesign>;

  static DesignMeasure gaussian(Eigen::VectorXd center, Eigen::VectorXd sd);
  static DesignMeasure gaussian1(double center, double sd);
  static DesignMeasure uniform(Box box);
  static DesignMeasure truncated(DensityFn reference, double threshold, Box proposal_box,
                                 std::size_t rejection_cap = 1000000);

  [[nodiscard]] int dim() const noexcept { return dim_; }
  [[nodiscard]] const Variant& variant() const noexcept { return variant_; }
  [[nodiscard]] std::string description() const;

  /// rho(u). For the truncated measure this is 1/vol(region) inside the region, with the
  /// volume estimated once by a grid scan of the proposal box (d <= 2).
  [[nodiscard]] double density(const Point& u) const;

 private:
  DesignMeasure(Variant v, int dim) : variant_(std::move(v)), dim_(dim) {}
  Variant variant_;
  int dim_;
  struct VolumeCache {
    std::once_flag once;
    double volume = 0.0;
  };
  std::shared_ptr<VolumeCache> volume_cache_ = std::make_shared<VolumeCache>();
};

/// n i.i.d. draws. Truncated measures throw RejectionCapExceeded (with the observed
/// acceptance rate) once the attempt budget is spent.
Design sample_design(const DesignMeasure& measure, std::size_t n, std::uint64_t seed);
Design sample_design(const DesignMeasure& measure, std::size_t n, Rng& rng);

/// Superlevel set {u in scan_box : density(u) > threshold}.
struct TruncationRegion {
  DensityFn density;
  double threshold = 0.0;
  Box scan_box;
  /// 1-D only: the set as disjoint sorted intervals, endpoints refined by bisection.
  std::vector<std::pair<double, double>> intervals;

  [[nodiscard]] bool contains(const Point& u) const;
  [[nodiscard]] int dim() const { return scan_box.dim(); }
  /// Exact length in 1-D.
  [[nodiscard]] double measure_1d() const;
};

/// Builds the region from a scan on `resolution` points per dimension (d <= 2).
/// Throws EmptyRegion when no scan point is above the threshold.
TruncationRegion truncation_region(DensityFn density, double threshold, Box scan_box, std::size_t resolution = 4096);

/// Threshold c * N^{-2 tau / d}.
double threshold_rule(double c, double tau, std::size_t n, int dim);

using FillRegion = std::variant<Box, TruncationRegion>;

struct FillDistance {
  double value = std::numeric_limits<double>::infinity();
  std::string method;  // "exact-1d" or "grid"
};

inline constexpr std::size_t kDefaultFillResolution = 512;

/// sup over the region of the distance to the nearest design point inside the region.
/// Exact in 1-D; otherwise the sup runs over a grid of `resolution` points per
/// dimension intersected with the region. Infinity when no design point is in the region.
FillDistance fill_distance(const Design& design, const FillRegion& region,
                           std::size_t resolution = kDefaultFillResolution);

struct FillDecayOptions {
  std::vector<std::size_t> n_list;
  std::size_t replications = 200;
  std::uint64_t seed = 0;
  std::size_t resolution = kDefaultFillResolution;
  /// h_0 of the tail probability P[h > h_0]; 0 picks the median h at the first N.
  double tail_threshold = 0.0;
  int threads = 1;
};

struct FillDecayRow {
  std::size_t n = 0;
  double mean_h = 0.0;
  double std_error = 0.0;
  double q10 = 0.0;
  double q90 = 0.0;
  double tail_probability = 0.0;
  double tail_std_error = 0.0;
};

struct FillDecayResult {
  std::vector<FillDecayRow> rows;
  /// replicate_h[i][r] for n_list[i], replicate r.
  std::vector<std::vector<double>> replicate_h;
  /// Least-squares slope of log E[h] against log N.
  double slope = 0.0;
  double tail_threshold = 0.0;
};

/// Monte Carlo study of the fill distance of i.i.d. designs. Replicate r at n_list[i]
/// draws from stream stream_seed(seed, i * R + r), so results do not depend on threads.
/// Requires an increasing n_list and R >= 30.
FillDecayResult fill_decay_study(const DesignMeasure& measure, const FillRegion& region,
                                 const FillDecayOptions& options);

/// Per-cell bookkeeping on a uniform partition of a box into cells_per_dim^d cells.
struct PartitionCell {
  Box cell;
  double sup_density = 0.0;
  std::size_t design_points = 0;
  double fill_distance = std::numeric_limits<double>::infinity();
};

std::vector<PartitionCell> partition_report(const Design& design, const DensityFn& density, const Box& box,
                                            std::size_t cells_per_dim, std::size_t resolution_per_cell = 32);

/// Least-squares slope of y against x.
double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace gpbayes
