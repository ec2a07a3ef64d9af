#include "eie/datasets.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace eie {

void MixtureSpec::validate() const {
  if (centers.empty()) throw std::invalid_argument("mixture: need at least one center");
  if (weights.size() != centers.size()) {
    throw std::invalid_argument("mixture: weights and centers differ in length");
  }
  const Eigen::Index d = centers.front().size();
  if (d < 1) throw std::invalid_argument("mixture: centers must have dimension >= 1");
  for (const auto& c : centers) {
    if (c.size() != d) throw std::invalid_argument("mixture: centers differ in dimension");
    if (!c.allFinite()) throw std::invalid_argument("mixture: non-finite center");
  }
  if (!(component_std > 0.0) || !std::isfinite(component_std)) {
    throw std::invalid_argument("mixture: component_std must be positive");
  }
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw std::invalid_argument("mixture: weights must be non-negative");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) throw std::invalid_argument("mixture: weights must sum to 1");
}

MixtureSpec spec_two_mode() {
  MixtureSpec spec;
  spec.centers = {Vector::Constant(2, -5.0), Vector::Constant(2, 5.0)};
  spec.weights = {0.2, 0.8};
  spec.component_std = 1.0;
  return spec;
}

MixtureSpec spec_ring8(double radius, double component_std) {
  MixtureSpec spec;
  for (int k = 0; k < 8; ++k) {
    const double angle = k * std::numbers::pi / 4.0;
    Vector c(2);
    c << radius * std::cos(angle), radius * std::sin(angle);
    spec.centers.push_back(c);
  }
  spec.weights.assign(8, 1.0 / 8.0);
  spec.component_std = component_std;
  return spec;
}

MixtureSpec spec_grid25(double spacing, double component_std) {
  MixtureSpec spec;
  for (int i = -2; i <= 2; ++i) {
    for (int j = -2; j <= 2; ++j) {
      Vector c(2);
      c << i * spacing, j * spacing;
      spec.centers.push_back(c);
    }
  }
  spec.weights.assign(25, 1.0 / 25.0);
  spec.component_std = component_std;
  return spec;
}

MixtureSpec spec_by_name(const std::string& name) {
  if (name == "two_mode") return spec_two_mode();
  if (name == "ring8") return spec_ring8();
  if (name == "grid25") return spec_grid25();
  throw std::invalid_argument("unknown mixture preset '" + name + "'");
}

LabeledBatch sample_labeled(const MixtureSpec& spec, std::size_t n, Rng& rng) {
  spec.validate();
  if (n < 1) throw std::invalid_argument("sample: need n >= 1");
  std::vector<double> cumulative(spec.weights.size());
  double running = 0.0;
  for (std::size_t c = 0; c < spec.weights.size(); ++c) {
    running += spec.weights[c];
    cumulative[c] = running;
  }
  const Eigen::Index d = spec.dim();
  LabeledBatch out{SampleBatch(static_cast<Eigen::Index>(n), d), std::vector<std::size_t>(n)};
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t c = rng.categorical(cumulative);
    out.components[i] = c;
    for (Eigen::Index j = 0; j < d; ++j) {
      out.points(static_cast<Eigen::Index>(i), j) = spec.centers[c](j) + spec.component_std * rng.normal();
    }
  }
  return out;
}

SampleBatch sample(const MixtureSpec& spec, std::size_t n, Rng& rng) {
  return sample_labeled(spec, n, rng).points;
}

DataSampler mixture_sampler(MixtureSpec spec) {
  spec.validate();
  return [spec = std::move(spec)](std::size_t n, Rng& rng) { return sample(spec, n, rng); };
}

}  // namespace eie
