#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "eie/energy.hpp"
#include "eie/trainer.hpp"
#include "test_util.hpp"

using namespace eie;
using eie::testing::rel_err;

namespace {

TrainConfig tiny_config() {
  TrainConfig cfg;
  cfg.generator_steps = 6;
  cfg.batch_B = 16;
  cfg.generator_hidden = {8};
  cfg.discriminator_hidden = {8};
  return cfg;
}

std::vector<double*> parameter_slots(MlpModel& m) {
  std::vector<double*> out;
  for (std::size_t l = 0; l < m.num_layers(); ++l) {
    for (Eigen::Index k = 0; k < m.weights[l].size(); ++k) out.push_back(m.weights[l].data() + k);
    for (Eigen::Index k = 0; k < m.biases[l].size(); ++k) out.push_back(m.biases[l].data() + k);
  }
  return out;
}

std::vector<double> flatten(const MlpGrads& g) {
  std::vector<double> out;
  for (std::size_t l = 0; l < g.weights.size(); ++l) {
    out.insert(out.end(), g.weights[l].data(), g.weights[l].data() + g.weights[l].size());
    out.insert(out.end(), g.biases[l].data(), g.biases[l].data() + g.biases[l].size());
  }
  return out;
}

// Relative error of an analytic parameter gradient against central differences of `loss`.
double parameter_fd_error(MlpModel& model, const MlpGrads& analytic,
                          const std::function<double()>& loss, double h = 1e-6) {
  const std::vector<double> a = flatten(analytic);
  std::vector<double*> slots = parameter_slots(model);
  Matrix am(1, static_cast<Eigen::Index>(a.size())), fm(1, static_cast<Eigen::Index>(a.size()));
  for (std::size_t k = 0; k < slots.size(); ++k) {
    const double saved = *slots[k];
    *slots[k] = saved + h;
    const double up = loss();
    *slots[k] = saved - h;
    const double down = loss();
    *slots[k] = saved;
    am(0, static_cast<Eigen::Index>(k)) = a[k];
    fm(0, static_cast<Eigen::Index>(k)) = (up - down) / (2.0 * h);
  }
  return rel_err(am, fm);
}

}  // namespace

TEST(TrainConfig, Validation) {
  TrainConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  EXPECT_EQ(cfg.lr_D, 1e-5);
  EXPECT_EQ(cfg.lr_G, 1e-4);
  EXPECT_EQ(cfg.n_c, 3);
  EXPECT_EQ(cfg.batch_B, 64);
  EXPECT_EQ(cfg.kernel.cutoff_R, 0.1);
  EXPECT_EQ(cfg.stabilizer.cutoff_Rs, 0.8);
  EXPECT_EQ(cfg.stabilizer.weight_eps, 1.0);
  cfg.feature_dim = 3;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
  cfg.kernel.dim_n = 3;
  cfg.stabilizer.order_m = 4;
  EXPECT_NO_THROW(cfg.validate());
  cfg.flags.use_discriminator = false;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);  // n must equal the data dim then
  TrainConfig bad;
  bad.n_c = 0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(TrainHistory, AppendOnlyAndMonotone) {
  TrainHistory h;
  h.append({1, 0.0, 0.0, 1.0});
  h.append({2, 0.0, 0.0, 1.0});
  EXPECT_THROW(h.append({1, 0.0, 0.0, 2.0}), std::logic_error);
  EXPECT_THROW(h.append({3, 0.0, 0.0, 0.5}), std::logic_error);
  EXPECT_EQ(h.records().size(), 2u);
}

TEST(TrainGan, UpdateCountersFollowAlgorithmShape) {
  const TrainConfig cfg = tiny_config();
  Rng rng(1);
  const TrainResult r = train_gan(cfg, mixture_sampler(spec_grid25()), rng, zero_wall_clock());
  ASSERT_FALSE(r.aborted());
  const TrainCounters& c = r.history.counters;
  EXPECT_EQ(c.generator_updates, cfg.generator_steps);
  EXPECT_EQ(c.discriminator_updates, cfg.n_c * c.generator_updates);
  // One fresh data batch and one fresh noise batch per D iteration and per G step.
  EXPECT_EQ(c.data_batches, (cfg.n_c + 1) * cfg.generator_steps);
  EXPECT_EQ(c.noise_batches, (cfg.n_c + 1) * cfg.generator_steps);
  EXPECT_EQ(r.history.records().size(), static_cast<std::size_t>(cfg.generator_steps));
}

TEST(TrainGan, EveryMinibatchIsFresh) {
  TrainConfig cfg = tiny_config();
  std::vector<SampleBatch> seen;
  const MixtureSpec spec = spec_two_mode();
  const DataSampler counting = [&](std::size_t n, Rng& rng) {
    seen.push_back(sample(spec, n, rng));
    return seen.back();
  };
  Rng rng(2);
  train_gan(cfg, counting, rng, zero_wall_clock());
  ASSERT_EQ(seen.size(), static_cast<std::size_t>((cfg.n_c + 1) * cfg.generator_steps));
  for (std::size_t i = 1; i < seen.size(); ++i) EXPECT_NE(seen[i], seen[i - 1]);
}

TEST(TrainGan, SeedDeterminism) {
  const TrainConfig cfg = tiny_config();
  auto run = [&](std::uint64_t seed) {
    Rng rng(seed);
    return train_gan(cfg, mixture_sampler(spec_ring8()), rng, zero_wall_clock());
  };
  const TrainResult a = run(9), b = run(9), c = run(10);
  ASSERT_EQ(a.history.records().size(), b.history.records().size());
  for (std::size_t i = 0; i < a.history.records().size(); ++i) {
    EXPECT_EQ(a.history.records()[i].loss_d, b.history.records()[i].loss_d);
    EXPECT_EQ(a.history.records()[i].loss_g, b.history.records()[i].loss_g);
  }
  EXPECT_EQ(a.generator.weights[0], b.generator.weights[0]);
  EXPECT_NE(a.generator.weights[0], c.generator.weights[0]);
}

TEST(TrainGan, ZeroStepsReturnsInitializedGenerator) {
  TrainConfig cfg = tiny_config();
  cfg.generator_steps = 0;
  Rng rng(3);
  const TrainResult r = train_eieg_generator(cfg, mixture_sampler(spec_two_mode()), rng);
  Rng again(3);
  const std::uint64_t gen_seed = again.split();
  const MlpModel fresh = mlp_init(gen_seed, {2, 8, 2});
  EXPECT_EQ(r.generator.weights[0], fresh.weights[0]);
  EXPECT_EQ(r.generator.weights[1], fresh.weights[1]);
  EXPECT_FALSE(r.discriminator.has_value());
  EXPECT_TRUE(r.history.records().empty());
}

TEST(TrainGan, NonFiniteLossAborts) {
  // A divergent discriminator step size overflows the features on the next pass.
  TrainConfig cfg = tiny_config();
  cfg.lr_D = 1e300;
  Rng rng(4);
  const TrainResult r = train_gan(cfg, mixture_sampler(spec_grid25()), rng, zero_wall_clock());
  ASSERT_TRUE(r.aborted());
  EXPECT_EQ(r.abort->step, 1);
  EXPECT_FALSE(r.abort->reason.empty());
  EXPECT_EQ(r.history.records().size(), 0u);
}

TEST(TrainGan, GeneratorOnlyUsesIdentityEmbedding) {
  TrainConfig cfg = tiny_config();
  cfg.flags.use_discriminator = false;
  Rng a(5), b(5);
  const TrainResult r1 = train_gan(cfg, mixture_sampler(spec_two_mode()), a, zero_wall_clock());
  const TrainResult r2 =
      train_eieg_generator(tiny_config(), mixture_sampler(spec_two_mode()), b, zero_wall_clock());
  EXPECT_EQ(r1.history.counters.discriminator_updates, 0);
  EXPECT_EQ(r1.generator.weights[0], r2.generator.weights[0]);
  for (const StepRecord& s : r1.history.records()) EXPECT_EQ(s.loss_d, 0.0);
}

TEST(GeneratorUpdateGradient, ChainMatchesFiniteDifferences) {
  Rng rng(6);
  const KernelConfig k{2, 0.3};
  const StabilizerConfig s{3, 0.8, 1.0};
  for (int trial = 0; trial < 8; ++trial) {
    MlpModel gen = mlp_init(100 + trial, {2, 8, 2});
    const MlpModel disc = mlp_init(200 + trial, {2, 8, 2});
    const Matrix noise = rng.normal_matrix(6, 2);
    const SampleBatch data = rng.normal_matrix(6, 2);
    const bool self = trial % 2 == 0;
    const PairKernel pk = trial % 4 < 2 ? PairKernel::elastic(k) : PairKernel::combined(k, s);
    const LossAndGrads lg = generator_update_gradient(gen, &disc, noise, data, pk, self);
    auto loss = [&] {
      return generator_loss(mlp_forward(disc, data), mlp_forward(disc, mlp_forward(gen, noise)), pk,
                            self);
    };
    EXPECT_EQ(lg.loss, loss());
    EXPECT_LT(parameter_fd_error(gen, lg.grads, loss), 1e-4) << trial;
  }
}

TEST(GeneratorUpdateGradient, IdentityEmbeddingReducesToEstimatorGradient) {
  Rng rng(7);
  const MlpModel gen = mlp_init(8, {2, 6, 2});
  const Matrix noise = rng.normal_matrix(5, 2);
  const SampleBatch data = rng.normal_matrix(5, 2);
  const PairKernel pk = PairKernel::elastic(KernelConfig{2, 0.3});
  const LossAndGrads lg = generator_update_gradient(gen, nullptr, noise, data, pk, true);
  // The generator loss differs from eieg_estimate by a constant, so the chains agree.
  const Matrix upstream = eieg_grad_wrt(mlp_forward(gen, noise), data, pk);
  const MlpGrads expected = mlp_backward(gen, noise, upstream).params;
  for (std::size_t l = 0; l < gen.num_layers(); ++l) {
    EXPECT_LT(rel_err(lg.grads.weights[l], expected.weights[l]), 1e-12);
  }
}

TEST(GeneratorUpdateGradient, ZeroUpstreamGivesZeroGradient) {
  const MlpModel gen = mlp_init(9, {2, 6, 2});
  const MlpBackward b = mlp_backward(gen, Matrix::Ones(3, 2), Matrix::Zero(3, 2));
  for (const Matrix& w : b.params.weights) EXPECT_TRUE(w.isZero(0.0));
}

TEST(DiscriminatorUpdateGradient, MatchesFiniteDifferences) {
  Rng rng(10);
  const KernelConfig k{2, 0.3};
  const StabilizerConfig s{3, 0.8, 1.0};
  for (int trial = 0; trial < 6; ++trial) {
    MlpModel disc = mlp_init(300 + trial, {2, 8, 2});
    const SampleBatch data = rng.normal_matrix(6, 2);
    const SampleBatch gen = rng.normal_matrix(5, 2);
    const LossAndGrads lg = discriminator_update_gradient(disc, data, gen, k, s);
    auto loss = [&] {
      return discriminator_objective(mlp_forward(disc, data), mlp_forward(disc, gen), k, s);
    };
    EXPECT_LT(parameter_fd_error(disc, lg.grads, loss), 1e-4) << trial;
  }
}
