#pragma once

#include <cstdint>
#include <vector>

#include "eie/datasets.hpp"
#include "eie/kernels.hpp"
#include "eie/linalg.hpp"
#include "eie/trainer.hpp"

namespace eie {

struct CoverageReport {
  int modes_total = 0;
  int modes_hit = 0;
  double high_quality_fraction = 0.0;
  /// Samples assigned to each center (nearest center, any distance).
  std::vector<std::int64_t> assigned;
  /// Assigned samples within threshold_sigmas * component_std of their center.
  std::vector<std::int64_t> high_quality;
};

/// Nearest-center assignment; ties go to the lower center index.
/// Throws std::invalid_argument on empty samples or a dimension mismatch.
CoverageReport mode_coverage(const SampleBatch& samples, const MixtureSpec& spec,
                             double threshold_sigmas = 4.0);

/// Axis-aligned box [x_min, x_max] x [y_min, y_max].
struct GridExtent {
  double x_min = -1.0;
  double x_max = 1.0;
  double y_min = -1.0;
  double y_max = 1.0;
};

/// Cell-center coordinate of cell i on an axis split into `resolution` cells.
double grid_center(double lo, double hi, int resolution, int i);

/// Silverman-style bandwidth for 2-D data: mean coordinate std * n^(-1/6).
double silverman_bandwidth(const SampleBatch& samples);

/// Gaussian KDE (std `bandwidth` per coordinate) of 2-D samples evaluated at
/// the cell centers. out(i, j) is the density at (x_i, y_j).
Matrix kde_grid(const SampleBatch& samples, double bandwidth, const GridExtent& extent,
                int resolution);

/// Gaussian KDE at a single point.
double kde_at(const SampleBatch& samples, double bandwidth, const Eigen::Ref<const Vector>& point);

struct EnergyTracePoint {
  std::int64_t step = 0;
  double energy = 0.0;
};

/// eieg_estimate(reference, snapshot) for every stored snapshot, in order.
std::vector<EnergyTracePoint> energy_trace(const std::vector<Snapshot>& snapshots,
                                           const SampleBatch& reference, const PairKernel& kernel);

/// Mean Euclidean distance over unordered pairs of distinct rows (0 for < 2 rows).
double mean_pairwise_distance(const SampleBatch& points);

}  // namespace eie
