#include "eie/trainer.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "eie/energy.hpp"

namespace eie {

void TrainConfig::validate() const {
  if (!(lr_G > 0.0) || !(lr_D > 0.0)) throw std::invalid_argument("learning rates must be positive");
  if (!(adam_beta1 >= 0.0 && adam_beta1 < 1.0) || !(adam_beta2 >= 0.0 && adam_beta2 < 1.0)) {
    throw std::invalid_argument("Adam betas must lie in [0, 1)");
  }
  if (n_c < 1) throw std::invalid_argument("n_c must be >= 1");
  if (batch_B < 1) throw std::invalid_argument("batch_B must be >= 1");
  if (generator_steps < 0) throw std::invalid_argument("generator_steps must be >= 0");
  if (data_dim < 1 || feature_dim < 1 || noise_dim < 1) {
    throw std::invalid_argument("data_dim, feature_dim and noise_dim must be positive");
  }
  if (snapshot_every < 0 || snapshot_size < 1) throw std::invalid_argument("bad snapshot settings");
  kernel.validate();
  const int expected_n = flags.use_discriminator ? feature_dim : data_dim;
  if (kernel.dim_n != expected_n) {
    throw std::invalid_argument("kernel dim_n must equal the " +
                                std::string(flags.use_discriminator ? "feature" : "data") +
                                " dimension (" + std::to_string(expected_n) + ")");
  }
  if (flags.use_discriminator || flags.stabilizer_in_generator_loss) {
    stabilizer.validate_against(kernel);
  }
}

void TrainHistory::append(const StepRecord& record) {
  if (!records_.empty()) {
    const StepRecord& last = records_.back();
    if (record.step < last.step || record.wall_ms < last.wall_ms) {
      throw std::logic_error("training history must be appended in order");
    }
  }
  records_.push_back(record);
}

void TrainHistory::add_snapshot(Snapshot snapshot) { snapshots_.push_back(std::move(snapshot)); }

WallClock steady_wall_clock() {
  const auto start = std::chrono::steady_clock::now();
  return [start] {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
  };
}

WallClock zero_wall_clock() {
  return [] { return 0.0; };
}

namespace {

LossAndGrads non_finite(const MlpModel& model) {
  return {std::numeric_limits<double>::quiet_NaN(), MlpGrads::zeros_like(model)};
}

}  // namespace

LossAndGrads generator_update_gradient(const MlpModel& generator, const MlpModel* discriminator,
                                       const Matrix& noise, const SampleBatch& data,
                                       const PairKernel& kernel, bool self_interaction) {
  const MlpTape gen_tape = mlp_record(generator, noise);
  const Matrix& generated = gen_tape.output();
  LossAndGrads out;
  if (!generated.allFinite()) return non_finite(generator);
  if (discriminator == nullptr) {
    out.loss = generator_loss(data, generated, kernel, self_interaction);
    const SampleBatch upstream = generator_loss_grad(data, generated, kernel, self_interaction);
    out.grads = mlp_backward(generator, gen_tape, upstream).params;
    return out;
  }
  const Matrix data_feat = mlp_forward(*discriminator, data);
  const MlpTape disc_tape = mlp_record(*discriminator, generated);
  const Matrix& gen_feat = disc_tape.output();
  if (!data_feat.allFinite() || !gen_feat.allFinite()) return non_finite(generator);
  out.loss = generator_loss(data_feat, gen_feat, kernel, self_interaction);
  const SampleBatch feat_grad = generator_loss_grad(data_feat, gen_feat, kernel, self_interaction);
  const Matrix sample_grad = mlp_backward(*discriminator, disc_tape, feat_grad).inputs;
  out.grads = mlp_backward(generator, gen_tape, sample_grad).params;
  return out;
}

LossAndGrads discriminator_update_gradient(const MlpModel& discriminator, const SampleBatch& data,
                                           const SampleBatch& generated,
                                           const KernelConfig& kernel,
                                           const StabilizerConfig& stabilizer) {
  const MlpTape data_tape = mlp_record(discriminator, data);
  const MlpTape gen_tape = mlp_record(discriminator, generated);
  if (!data_tape.output().allFinite() || !gen_tape.output().allFinite()) {
    return non_finite(discriminator);
  }
  LossAndGrads out;
  out.loss = discriminator_objective(data_tape.output(), gen_tape.output(), kernel, stabilizer);
  const DiscriminatorObjectiveGrad feat_grad =
      discriminator_objective_grad(data_tape.output(), gen_tape.output(), kernel, stabilizer);
  out.grads = mlp_backward(discriminator, data_tape, feat_grad.wrt_x).params;
  out.grads += mlp_backward(discriminator, gen_tape, feat_grad.wrt_g).params;
  return out;
}

namespace {

std::vector<int> layer_dims(int in, const std::vector<int>& hidden, int out) {
  std::vector<int> dims{in};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(out);
  return dims;
}

}  // namespace

TrainResult train_gan(const TrainConfig& cfg, const DataSampler& data, Rng& rng,
                      const WallClock& clock) {
  cfg.validate();
  const bool use_disc = cfg.flags.use_discriminator;

  // Independent streams derived from the caller's generator, in a fixed order.
  const std::uint64_t gen_seed = rng.split();
  const std::uint64_t disc_seed = rng.split();
  Rng data_rng(rng.split());
  Rng noise_rng(rng.split());
  Rng snapshot_rng(rng.split());
  const Matrix snapshot_noise = snapshot_rng.normal_matrix(cfg.snapshot_size, cfg.noise_dim);

  TrainResult result;
  result.generator = mlp_init(gen_seed, layer_dims(cfg.noise_dim, cfg.generator_hidden, cfg.data_dim),
                              cfg.leaky_slope);
  if (use_disc) {
    result.discriminator = mlp_init(
        disc_seed, layer_dims(cfg.data_dim, cfg.discriminator_hidden, cfg.feature_dim),
        cfg.leaky_slope);
  }
  MlpModel& gen = result.generator;
  AdamState gen_state = AdamState::for_model(gen, cfg.lr_G);
  gen_state.beta1 = cfg.adam_beta1;
  gen_state.beta2 = cfg.adam_beta2;
  AdamState disc_state;
  if (use_disc) {
    disc_state = AdamState::for_model(*result.discriminator, cfg.lr_D);
    disc_state.beta1 = cfg.adam_beta1;
    disc_state.beta2 = cfg.adam_beta2;
  }

  const PairKernel gen_kernel = cfg.flags.stabilizer_in_generator_loss
                                    ? PairKernel::combined(cfg.kernel, cfg.stabilizer)
                                    : PairKernel::elastic(cfg.kernel);
  const auto batch = static_cast<std::size_t>(cfg.batch_B);
  TrainCounters& counters = result.history.counters;

  auto draw = [&](SampleBatch& x, Matrix& z) {
    x = data(batch, data_rng);
    ++counters.data_batches;
    z = noise_rng.normal_matrix(cfg.batch_B, cfg.noise_dim);
    ++counters.noise_batches;
  };
  auto abort = [&](std::int64_t step, const char* phase, std::string reason) {
    result.abort = AbortRecord{step, phase, std::move(reason)};
    return result;
  };

  for (std::int64_t step = 1; step <= cfg.generator_steps; ++step) {
    double loss_d = 0.0;
    SampleBatch x;
    Matrix z;
    if (use_disc) {
      MlpModel& disc = *result.discriminator;
      for (int k = 0; k < cfg.n_c; ++k) {
        draw(x, z);
        const Matrix generated = mlp_forward(gen, z);
        LossAndGrads d = discriminator_update_gradient(disc, x, generated, cfg.kernel, cfg.stabilizer);
        if (!std::isfinite(d.loss)) {
          return abort(step, "discriminator", "non-finite discriminator objective");
        }
        loss_d = d.loss;
        adam_step(disc, d.grads, disc_state, /*ascend=*/true);
        ++counters.discriminator_updates;
      }
    }

    draw(x, z);
    const MlpModel* disc_ptr = use_disc ? &*result.discriminator : nullptr;
    LossAndGrads g =
        generator_update_gradient(gen, disc_ptr, z, x, gen_kernel, cfg.flags.self_interaction);
    if (!std::isfinite(g.loss)) return abort(step, "generator", "non-finite generator loss");
    adam_step(gen, g.grads, gen_state, /*ascend=*/false);
    ++counters.generator_updates;

    result.history.append(StepRecord{step, loss_d, g.loss, clock()});
    if (cfg.snapshot_every > 0 && step % cfg.snapshot_every == 0) {
      result.history.add_snapshot(Snapshot{step, mlp_forward(gen, snapshot_noise)});
    }
  }
  return result;
}

TrainResult train_eieg_generator(TrainConfig cfg, const DataSampler& data, Rng& rng,
                                 const WallClock& clock) {
  cfg.flags.use_discriminator = false;
  return train_gan(cfg, data, rng, clock);
}

}  // namespace eie
