#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "eie/linalg.hpp"
#include "eie/rng.hpp"

namespace eie {

/// Isotropic Gaussian mixture: sum_c w_c N(center_c, std^2 I).
struct MixtureSpec {
  std::vector<Vector> centers;
  double component_std = 1.0;
  std::vector<double> weights;

  Eigen::Index dim() const { return centers.empty() ? 0 : centers.front().size(); }
  void validate() const;
};

/// 1/5 N((-5,-5), I) + 4/5 N((5,5), I).
MixtureSpec spec_two_mode();

/// Eight equal-weight components on a circle. Radius and std are repository
/// conventions (defaults 2 and 0.02), not values fixed by the method.
MixtureSpec spec_ring8(double radius = 2.0, double component_std = 0.02);

/// 25 equal-weight components on the lattice {-2s,-s,0,s,2s}^2. Spacing and
/// std are repository conventions (defaults 2 and 0.05).
MixtureSpec spec_grid25(double spacing = 2.0, double component_std = 0.05);

/// Named presets: "two_mode", "ring8", "grid25".
MixtureSpec spec_by_name(const std::string& name);

struct LabeledBatch {
  SampleBatch points;
  std::vector<std::size_t> components;
};

/// i.i.d. draws: component index from weights, then center + std * N(0, I).
SampleBatch sample(const MixtureSpec& spec, std::size_t n, Rng& rng);
LabeledBatch sample_labeled(const MixtureSpec& spec, std::size_t n, Rng& rng);

/// Source of data minibatches for the trainers and the particle flow.
using DataSampler = std::function<SampleBatch(std::size_t n, Rng& rng)>;

DataSampler mixture_sampler(MixtureSpec spec);

}  // namespace eie
