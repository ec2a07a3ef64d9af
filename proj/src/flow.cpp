#include "eie/flow.hpp"

#include <cmath>
#include <stdexcept>

#include "eie/energy.hpp"
#include "eie/kernels.hpp"

namespace eie {

namespace {

constexpr double kDivergenceLimit = 1e6;

// f(x, y) = s(r) (y - x) with s = 1/r^(n+1) outside R, 1/R^(n+1) inside.
double force_scale(const FlowConfig& cfg, double r) {
  return r >= cfg.cutoff_R ? 1.0 / ipow(r, cfg.dim_n + 1) : 1.0 / ipow(cfg.cutoff_R, cfg.dim_n + 1);
}

// sum_j f(a_i, b_j) for every row i.
SampleBatch summed_forces(const FlowConfig& cfg, const SampleBatch& a, const SampleBatch& b) {
  SampleBatch out = SampleBatch::Zero(a.rows(), a.cols());
  RowVector diff(a.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
      diff = b.row(j) - a.row(i);
      const double r = diff.norm();
      if (r == 0.0) continue;
      out.row(i) += force_scale(cfg, r) * diff;
    }
  }
  return out;
}

}  // namespace

void FlowConfig::validate() const {
  if (!(mobility_M1 >= 0.0) || !(mobility_M2 >= 0.0)) {
    throw std::invalid_argument("flow: mobilities must be non-negative");
  }
  if (!(dt > 0.0)) throw std::invalid_argument("flow: dt must be positive");
  if (!(cutoff_R > 0.0)) throw std::invalid_argument("flow: cutoff_R must be positive");
  if (total_steps < 0) throw std::invalid_argument("flow: total_steps must be >= 0");
  if (n1 < 1 || n2 < 1) throw std::invalid_argument("flow: batch sizes must be positive");
  if (dim_n < 1) throw std::invalid_argument("flow: dim_n must be positive");
  if (record_every < 1) throw std::invalid_argument("flow: record_every must be >= 1");
  if (energy_ref_size < 1) throw std::invalid_argument("flow: energy_ref_size must be >= 1");
  if (snapshot_every < 0) throw std::invalid_argument("flow: snapshot_every must be >= 0");
}

Vector pair_force(const FlowConfig& cfg, const Eigen::Ref<const Vector>& x,
                  const Eigen::Ref<const Vector>& y) {
  if (x.size() != y.size()) throw std::invalid_argument("pair_force: dimension mismatch");
  Vector diff = y - x;
  const double r = diff.norm();
  if (r == 0.0) return Vector::Zero(diff.size());
  return force_scale(cfg, r) * diff;
}

FlowStep flow_step(const FlowConfig& cfg, const SampleBatch& particles,
                   const SampleBatch& data_batch) {
  check_batch(particles, "flow_step particles");
  check_batch(data_batch, "flow_step data");
  if (particles.cols() != data_batch.cols()) {
    throw std::invalid_argument("flow_step: dimension mismatch");
  }
  const double n1 = static_cast<double>(data_batch.rows());
  const double n2 = static_cast<double>(particles.rows());
  SampleBatch velocity = SampleBatch::Zero(particles.rows(), particles.cols());
  if (cfg.mobility_M1 != 0.0) {
    velocity += (cfg.mobility_M1 / n1) * summed_forces(cfg, particles, data_batch);
  }
  if (cfg.mobility_M2 != 0.0) {
    velocity -= (cfg.mobility_M2 / n2) * summed_forces(cfg, particles, particles);
  }
  FlowStep out;
  out.particles = particles + cfg.dt * velocity;
  if (!out.particles.allFinite()) throw std::domain_error("flow_step: non-finite particle positions");
  out.max_displacement = cfg.dt * velocity.rowwise().norm().maxCoeff();
  return out;
}

SampleBatch initial_particles(int n2, int dim, Rng& rng) { return rng.normal_matrix(n2, dim); }

FlowResult run_flow(const FlowConfig& cfg, const SampleBatch& init, const DataSampler& data,
                    Rng& rng) {
  cfg.validate();
  check_batch(init, "run_flow initial particles");
  Rng data_rng(rng.split());
  Rng reference_rng(rng.split());
  const SampleBatch reference = data(static_cast<std::size_t>(cfg.energy_ref_size), reference_rng);
  if (reference.cols() != init.cols()) throw std::invalid_argument("run_flow: dimension mismatch");
  const PairKernel kernel = PairKernel::elastic(KernelConfig{cfg.dim_n, cfg.cutoff_R});

  FlowResult result;
  result.particles = init;
  result.energy.push_back({0, eieg_estimate(reference, init, kernel)});
  result.snapshots.push_back({0, init});

  for (std::int64_t step = 1; step <= cfg.total_steps; ++step) {
    const SampleBatch batch = data(static_cast<std::size_t>(cfg.n1), data_rng);
    FlowStep next;
    try {
      next = flow_step(cfg, result.particles, batch);
    } catch (const std::domain_error& e) {
      result.abort = FlowAbort{step, e.what()};
      return result;
    }
    if (next.particles.cwiseAbs().maxCoeff() > kDivergenceLimit) {
      result.abort = FlowAbort{step, "particle coordinate exceeded 1e6"};
      result.particles = std::move(next.particles);
      return result;
    }
    if (next.max_displacement > cfg.max_displacement_warn) {
      if (result.displacement_warnings == 0) result.first_warning_step = step;
      ++result.displacement_warnings;
    }
    result.particles = std::move(next.particles);
    if (step % cfg.record_every == 0 || step == cfg.total_steps) {
      result.energy.push_back({step, eieg_estimate(reference, result.particles, kernel)});
    }
    if ((cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0) || step == cfg.total_steps) {
      result.snapshots.push_back({step, result.particles});
    }
  }
  return result;
}

}  // namespace eie
