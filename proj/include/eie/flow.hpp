#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "eie/datasets.hpp"
#include "eie/linalg.hpp"

namespace eie {

/// Interacting-particle sampler settings. Defaults are the published ODE
/// sampler table (R=1, M1=100, M2=50, dt=0.1, N1=N2=64, T=100000).
struct FlowConfig {
  double mobility_M1 = 100.0;
  double mobility_M2 = 50.0;
  double dt = 0.1;
  double cutoff_R = 1.0;
  std::int64_t total_steps = 100000;
  int n1 = 64;  // data batch size
  int n2 = 64;  // particle count
  int dim_n = 2;
  /// Energy is recorded at step 0 and every record_every steps (and at the end).
  std::int64_t record_every = 100;
  /// Size of the fixed reference data batch used for the energy trace.
  int energy_ref_size = 512;
  /// Particle snapshots every this many steps (0 = only initial and final).
  std::int64_t snapshot_every = 0;
  /// A step moving any particle farther than this only raises a warning.
  double max_displacement_warn = 1.0;

  void validate() const;
};

/// f(x, y) = (y - x)/r^(n+1) for r >= R and (y - x)/R^(n+1) for r < R.
Vector pair_force(const FlowConfig& cfg, const Eigen::Ref<const Vector>& x,
                  const Eigen::Ref<const Vector>& y);

struct FlowStep {
  SampleBatch particles;
  double max_displacement = 0.0;
};

/// One explicit Euler step:
///   X_i += dt (M1 mean_j f(X_i, Y_j) - M2 mean_j f(X_i, X_j)).
/// Throws std::domain_error if the new positions are not finite.
FlowStep flow_step(const FlowConfig& cfg, const SampleBatch& particles,
                   const SampleBatch& data_batch);

struct EnergyPoint {
  std::int64_t step = 0;
  double energy = 0.0;
};

struct ParticleSnapshot {
  std::int64_t step = 0;
  SampleBatch particles;
};

struct FlowAbort {
  std::int64_t step = 0;
  std::string reason;
};

struct FlowResult {
  SampleBatch particles;
  std::vector<EnergyPoint> energy;
  std::vector<ParticleSnapshot> snapshots;
  std::int64_t displacement_warnings = 0;
  std::int64_t first_warning_step = -1;
  std::optional<FlowAbort> abort;
};

/// Standard-normal initial particles (n2 x dim).
SampleBatch initial_particles(int n2, int dim, Rng& rng);

/// Iterates flow_step with a fresh data batch of size n1 each step and records
/// eieg_estimate(reference, particles) with the elastic kernel (n = dim_n,
/// R = cutoff_R) against a fixed reference batch. Coordinates beyond 1e6 in
/// magnitude abort the run.
FlowResult run_flow(const FlowConfig& cfg, const SampleBatch& init, const DataSampler& data,
                    Rng& rng);

}  // namespace eie
