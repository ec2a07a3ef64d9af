#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "eie/energy.hpp"
#include "eie/evalmetrics.hpp"

using namespace eie;

namespace {

SampleBatch centers_of(const MixtureSpec& spec) {
  SampleBatch m(static_cast<Eigen::Index>(spec.centers.size()), spec.dim());
  for (std::size_t c = 0; c < spec.centers.size(); ++c) m.row(static_cast<Eigen::Index>(c)) = spec.centers[c];
  return m;
}

}  // namespace

TEST(ModeCoverage, SamplesAtCenters) {
  const MixtureSpec spec = spec_grid25();
  const CoverageReport r = mode_coverage(centers_of(spec), spec);
  EXPECT_EQ(r.modes_total, 25);
  EXPECT_EQ(r.modes_hit, 25);
  EXPECT_EQ(r.high_quality_fraction, 1.0);
}

TEST(ModeCoverage, AllAtOneCenter) {
  const MixtureSpec spec = spec_grid25();
  SampleBatch s(40, 2);
  s.rowwise() = spec.centers[7].transpose();
  const CoverageReport r = mode_coverage(s, spec);
  EXPECT_EQ(r.modes_hit, 1);
  EXPECT_EQ(r.assigned[7], 40);
  EXPECT_THROW(mode_coverage(SampleBatch(0, 2), spec), std::invalid_argument);
  EXPECT_THROW(mode_coverage(SampleBatch::Zero(3, 3), spec), std::invalid_argument);
}

TEST(ModeCoverage, MatchesBruteForceRecount) {
  const MixtureSpec spec = spec_grid25();
  Rng rng(3);
  SampleBatch s(600, 2);
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    s(i, 0) = -5.0 + 10.0 * rng.uniform();
    s(i, 1) = -5.0 + 10.0 * rng.uniform();
    if (i % 3 == 0) s.row(i) = spec.centers[static_cast<std::size_t>(i) % 25].transpose() * 1.0 +
                               RowVector::Constant(2, 0.1 * rng.normal());
  }
  // Lattice recount: nearest center by rounding each coordinate to the grid.
  std::vector<std::int64_t> assigned(25, 0), good(25, 0);
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const double gx = std::clamp(std::round(s(i, 0) / 2.0), -2.0, 2.0) * 2.0;
    const double gy = std::clamp(std::round(s(i, 1) / 2.0), -2.0, 2.0) * 2.0;
    std::size_t idx = 0;
    for (std::size_t c = 0; c < 25; ++c) {
      if (spec.centers[c](0) == gx && spec.centers[c](1) == gy) idx = c;
    }
    ++assigned[idx];
    if (std::hypot(s(i, 0) - gx, s(i, 1) - gy) <= 4.0 * 0.05) ++good[idx];
  }
  const CoverageReport r = mode_coverage(s, spec);
  EXPECT_EQ(r.assigned, assigned);
  EXPECT_EQ(r.high_quality, good);
  int hit = 0;
  std::int64_t total_good = 0, total = 0;
  for (std::size_t c = 0; c < 25; ++c) {
    hit += good[c] > 0;
    total_good += good[c];
    total += assigned[c];
  }
  EXPECT_EQ(r.modes_hit, hit);
  EXPECT_EQ(total, s.rows());
  EXPECT_DOUBLE_EQ(r.high_quality_fraction, static_cast<double>(total_good) / s.rows());
  EXPECT_LE(r.modes_hit, r.modes_total);
}

TEST(ModeCoverage, PermutationInvariant) {
  MixtureSpec spec = spec_ring8();
  Rng rng(4);
  SampleBatch s = sample(spec, 200, rng);
  const CoverageReport a = mode_coverage(s, spec);
  SampleBatch reversed = s.colwise().reverse();
  std::reverse(spec.centers.begin(), spec.centers.end());
  const CoverageReport b = mode_coverage(reversed, spec);
  EXPECT_EQ(a.modes_hit, b.modes_hit);
  EXPECT_EQ(a.high_quality_fraction, b.high_quality_fraction);
  std::vector<std::int64_t> back(b.assigned.rbegin(), b.assigned.rend());
  EXPECT_EQ(a.assigned, back);
}

TEST(KdeGrid, SinglePeakAndNormalization) {
  SampleBatch one(1, 2);
  one << 0.55, -0.45;
  const GridExtent ext{-3, 3, -3, 3};
  const Matrix g = kde_grid(one, 0.3, ext, 60);
  Eigen::Index i, j;
  g.maxCoeff(&i, &j);
  EXPECT_NEAR(grid_center(-3, 3, 60, static_cast<int>(i)), 0.55, 0.05 + 1e-12);
  EXPECT_NEAR(grid_center(-3, 3, 60, static_cast<int>(j)), -0.45, 0.05 + 1e-12);

  Rng rng(5);
  const SampleBatch s = sample(spec_ring8(), 300, rng);
  const double h = silverman_bandwidth(s);
  const Matrix k = kde_grid(s, h, GridExtent{-4, 4, -4, 4}, 200);
  const double cell = (8.0 / 200) * (8.0 / 200);
  EXPECT_NEAR(k.sum() * cell, 1.0, 0.02);
  EXPECT_THROW(kde_grid(s, 0.0, ext, 10), std::invalid_argument);
}

TEST(KdeGrid, TwoPointHandValues) {
  SampleBatch s(2, 2);
  s << 0.0, 0.0, 1.0, 0.0;
  const double h = 0.5;
  const double norm = 1.0 / (2.0 * std::numbers::pi * h * h);
  // Probe points and hand-summed densities: 1/2 sum_j norm exp(-d_j^2 / (2 h^2)).
  const struct { double x, y, expected; } probes[] = {
      {0.0, 0.0, 0.5 * norm * (1.0 + std::exp(-2.0))},
      {0.5, 0.0, norm * std::exp(-0.5)},
      {1.0, 1.0, 0.5 * norm * (std::exp(-4.0) + std::exp(-2.0))},
  };
  for (const auto& p : probes) {
    Vector v(2);
    v << p.x, p.y;
    EXPECT_NEAR(kde_at(s, h, v), p.expected, 1e-15);
  }
  // A 3x3 grid whose cell centers are exactly 0, 0.5, 1 in x.
  const Matrix g = kde_grid(s, h, GridExtent{-0.25, 1.25, -0.25, 1.25}, 3);
  EXPECT_NEAR(g(0, 0), probes[0].expected, 1e-15);
  EXPECT_NEAR(g(1, 0), probes[1].expected, 1e-15);
  EXPECT_NEAR(g(2, 2), probes[2].expected, 1e-15);
}

TEST(KdeGrid, TranslationEquivariant) {
  Rng rng(6);
  const SampleBatch s = rng.normal_matrix(50, 2);
  RowVector shift(2);
  shift << 1.5, -0.75;
  const SampleBatch moved = s.rowwise() + shift;
  const Matrix a = kde_grid(s, 0.4, GridExtent{-3, 3, -3, 3}, 30);
  const Matrix b = kde_grid(moved, 0.4, GridExtent{-1.5, 4.5, -3.75, 2.25}, 30);
  EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(EnergyTrace, Examples) {
  Rng rng(7);
  const SampleBatch ref = rng.normal_matrix(64, 2);
  const PairKernel k = PairKernel::elastic(KernelConfig{2, 0.1});
  const std::vector<Snapshot> perfect{{10, ref}, {20, ref}};
  for (const auto& p : energy_trace(perfect, ref, k)) EXPECT_LT(std::abs(p.energy), 1e-12);

  std::vector<Snapshot> shrinking;
  for (int s = 1; s <= 5; ++s) shrinking.push_back({s * 100, ref.array() + 2.0 / s});
  const auto a = energy_trace(shrinking, ref, k);
  const auto b = energy_trace(shrinking, ref, k);
  ASSERT_EQ(a.size(), 5u);
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].step, shrinking[i].step);
    EXPECT_EQ(a[i].energy, b[i].energy);
    EXPECT_EQ(a[i].energy, eieg_estimate(ref, shrinking[i].samples, k));
    if (i > 0) EXPECT_LT(a[i].energy, a[i - 1].energy);
  }
}

TEST(MeanPairwiseDistance, Examples) {
  SampleBatch s(3, 2);
  s << 0, 0, 3, 0, 0, 4;
  EXPECT_DOUBLE_EQ(mean_pairwise_distance(s), (3.0 + 4.0 + 5.0) / 3.0);
  EXPECT_EQ(mean_pairwise_distance(s.topRows(1)), 0.0);
}
