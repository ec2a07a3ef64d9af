#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eie/datasets.hpp"
#include "eie/kernels.hpp"
#include "eie/net.hpp"

namespace eie {

struct TrainFlags {
  bool self_interaction = true;
  /// Applies e - eps * e_s in the generator loss as well. Off by default: the
  /// stabilizer belongs to the discriminator objective.
  bool stabilizer_in_generator_loss = false;
  bool use_discriminator = true;
};

/// Defaults follow the EIEG GAN hyperparameter table; network shapes follow
/// the toy MLPs (2 -> 100 -> 50 -> out, leaky ReLU 0.2).
struct TrainConfig {
  double lr_G = 1e-4;
  double lr_D = 1e-5;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  int n_c = 3;
  int batch_B = 64;
  std::int64_t generator_steps = 20000;
  int data_dim = 2;
  int feature_dim = 2;
  int noise_dim = 2;
  std::vector<int> generator_hidden{100, 50};
  std::vector<int> discriminator_hidden{100, 50};
  double leaky_slope = 0.2;
  KernelConfig kernel{2, 0.1};
  StabilizerConfig stabilizer{3, 0.8, 1.0};
  std::uint64_t seed = 0;
  TrainFlags flags;
  /// Every this many generator steps, store generator output on a fixed noise batch (0 = never).
  std::int64_t snapshot_every = 0;
  int snapshot_size = 512;

  void validate() const;
};

struct StepRecord {
  std::int64_t step = 0;
  double loss_d = 0.0;
  double loss_g = 0.0;
  double wall_ms = 0.0;
};

struct Snapshot {
  std::int64_t step = 0;
  SampleBatch samples;
};

/// Update and minibatch accounting; every inner discriminator iteration and
/// every generator step draws one fresh data batch and one fresh noise batch.
struct TrainCounters {
  std::int64_t discriminator_updates = 0;
  std::int64_t generator_updates = 0;
  std::int64_t data_batches = 0;
  std::int64_t noise_batches = 0;
};

/// Append-only training log.
class TrainHistory {
 public:
  /// Throws std::logic_error if step or wall time decreases.
  void append(const StepRecord& record);
  void add_snapshot(Snapshot snapshot);

  const std::vector<StepRecord>& records() const { return records_; }
  const std::vector<Snapshot>& snapshots() const { return snapshots_; }
  TrainCounters counters;

 private:
  std::vector<StepRecord> records_;
  std::vector<Snapshot> snapshots_;
};

struct AbortRecord {
  std::int64_t step = 0;
  std::string phase;  // "discriminator" or "generator"
  std::string reason;
};

struct TrainResult {
  MlpModel generator;
  std::optional<MlpModel> discriminator;
  TrainHistory history;
  std::optional<AbortRecord> abort;

  bool aborted() const { return abort.has_value(); }
};

/// Milliseconds since the start of training; injectable so that outputs can be
/// made byte-reproducible.
using WallClock = std::function<double()>;
WallClock steady_wall_clock();
WallClock zero_wall_clock();

/// Alternates n_c ascent steps on the stabilized discriminator objective with
/// one descent step on the generator loss, sampling fresh data and noise
/// minibatches for each. A non-finite loss stops training and fills `abort`.
TrainResult train_gan(const TrainConfig& cfg, const DataSampler& data, Rng& rng,
                      const WallClock& clock = steady_wall_clock());

/// Generator-only training on data space (identity embedding, kernel.dim_n = data_dim).
TrainResult train_eieg_generator(TrainConfig cfg, const DataSampler& data, Rng& rng,
                                 const WallClock& clock = steady_wall_clock());

struct LossAndGrads {
  double loss = 0.0;
  MlpGrads grads;
};

/// Generator loss for noise z and data x, and its gradient with respect to the
/// generator parameters, chained through the discriminator input gradients
/// (or the identity when no discriminator is given).
LossAndGrads generator_update_gradient(const MlpModel& generator, const MlpModel* discriminator,
                                       const Matrix& noise, const SampleBatch& data,
                                       const PairKernel& kernel, bool self_interaction);

/// Stabilized discriminator objective and its gradient with respect to the
/// discriminator parameters, for fixed data and generated batches.
LossAndGrads discriminator_update_gradient(const MlpModel& discriminator, const SampleBatch& data,
                                           const SampleBatch& generated,
                                           const KernelConfig& kernel,
                                           const StabilizerConfig& stabilizer);

}  // namespace eie
