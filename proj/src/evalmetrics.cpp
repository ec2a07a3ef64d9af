#include "eie/evalmetrics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "eie/energy.hpp"

namespace eie {

CoverageReport mode_coverage(const SampleBatch& samples, const MixtureSpec& spec,
                             double threshold_sigmas) {
  spec.validate();
  if (samples.rows() == 0) throw std::invalid_argument("mode_coverage: no samples");
  if (samples.cols() != spec.dim()) throw std::invalid_argument("mode_coverage: dimension mismatch");
  if (!(threshold_sigmas > 0.0)) throw std::invalid_argument("mode_coverage: threshold must be positive");

  const std::size_t modes = spec.centers.size();
  CoverageReport report;
  report.modes_total = static_cast<int>(modes);
  report.assigned.assign(modes, 0);
  report.high_quality.assign(modes, 0);
  const double radius = threshold_sigmas * spec.component_std;

  std::int64_t good = 0;
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    std::size_t best = 0;
    double best_d2 = INFINITY;
    for (std::size_t c = 0; c < modes; ++c) {
      const double d2 = (samples.row(i).transpose() - spec.centers[c]).squaredNorm();
      if (d2 < best_d2) {
        best_d2 = d2;
        best = c;
      }
    }
    ++report.assigned[best];
    if (std::sqrt(best_d2) <= radius) {
      ++report.high_quality[best];
      ++good;
    }
  }
  for (std::int64_t hq : report.high_quality) report.modes_hit += hq > 0 ? 1 : 0;
  report.high_quality_fraction = static_cast<double>(good) / static_cast<double>(samples.rows());
  return report;
}

double grid_center(double lo, double hi, int resolution, int i) {
  return lo + (i + 0.5) * (hi - lo) / resolution;
}

double silverman_bandwidth(const SampleBatch& samples) {
  check_batch(samples, "silverman_bandwidth");
  const double n = static_cast<double>(samples.rows());
  if (samples.rows() < 2) throw std::invalid_argument("silverman_bandwidth: need at least two samples");
  const RowVector mean = samples.colwise().mean();
  double sigma = 0.0;
  for (Eigen::Index c = 0; c < samples.cols(); ++c) {
    sigma += std::sqrt((samples.col(c).array() - mean(c)).square().sum() / (n - 1.0));
  }
  sigma /= static_cast<double>(samples.cols());
  if (!(sigma > 0.0)) throw std::invalid_argument("silverman_bandwidth: samples have zero spread");
  return sigma * std::pow(n, -1.0 / 6.0);
}

double kde_at(const SampleBatch& samples, double bandwidth, const Eigen::Ref<const Vector>& point) {
  if (!(bandwidth > 0.0)) throw std::invalid_argument("kde: bandwidth must be positive");
  check_batch(samples, "kde samples");
  if (samples.cols() != point.size()) throw std::invalid_argument("kde: dimension mismatch");
  const double d = static_cast<double>(samples.cols());
  const double norm = std::pow(2.0 * std::numbers::pi * bandwidth * bandwidth, -d / 2.0);
  double total = 0.0;
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    const double d2 = (samples.row(i).transpose() - point).squaredNorm();
    total += std::exp(-d2 / (2.0 * bandwidth * bandwidth));
  }
  return norm * total / static_cast<double>(samples.rows());
}

Matrix kde_grid(const SampleBatch& samples, double bandwidth, const GridExtent& extent,
                int resolution) {
  if (samples.cols() != 2) throw std::invalid_argument("kde_grid: samples must be 2-D");
  if (resolution < 1) throw std::invalid_argument("kde_grid: resolution must be >= 1");
  if (!(extent.x_max > extent.x_min) || !(extent.y_max > extent.y_min)) {
    throw std::invalid_argument("kde_grid: empty extent");
  }
  Matrix out(resolution, resolution);
  Vector p(2);
  for (int i = 0; i < resolution; ++i) {
    p(0) = grid_center(extent.x_min, extent.x_max, resolution, i);
    for (int j = 0; j < resolution; ++j) {
      p(1) = grid_center(extent.y_min, extent.y_max, resolution, j);
      out(i, j) = kde_at(samples, bandwidth, p);
    }
  }
  return out;
}

std::vector<EnergyTracePoint> energy_trace(const std::vector<Snapshot>& snapshots,
                                           const SampleBatch& reference, const PairKernel& kernel) {
  std::vector<EnergyTracePoint> out;
  out.reserve(snapshots.size());
  for (const Snapshot& s : snapshots) out.push_back({s.step, eieg_estimate(reference, s.samples, kernel)});
  return out;
}

double mean_pairwise_distance(const SampleBatch& points) {
  const Eigen::Index n = points.rows();
  if (n < 2) return 0.0;
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) total += (points.row(i) - points.row(j)).norm();
  }
  return total / (0.5 * static_cast<double>(n) * static_cast<double>(n - 1));
}

}  // namespace eie
