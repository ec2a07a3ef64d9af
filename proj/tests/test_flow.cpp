#include <gtest/gtest.h>

#include "eie/energy.hpp"
#include "eie/flow.hpp"

using namespace eie;

namespace {

SampleBatch rows(std::initializer_list<std::initializer_list<double>> values) {
  SampleBatch m(static_cast<Eigen::Index>(values.size()),
                static_cast<Eigen::Index>(values.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : values) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

Vector vec(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

}  // namespace

TEST(FlowConfig, DefaultsAndValidation) {
  const FlowConfig cfg;
  EXPECT_EQ(cfg.cutoff_R, 1.0);
  EXPECT_EQ(cfg.mobility_M1, 100.0);
  EXPECT_EQ(cfg.mobility_M2, 50.0);
  EXPECT_EQ(cfg.dt, 0.1);
  EXPECT_EQ(cfg.n1, 64);
  EXPECT_EQ(cfg.n2, 64);
  EXPECT_EQ(cfg.total_steps, 100000);
  FlowConfig bad;
  bad.dt = 0.0;
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(PairForce, Examples) {
  const FlowConfig cfg;
  EXPECT_EQ(pair_force(cfg, vec(0, 0), vec(1, 0)), vec(1, 0));
  EXPECT_EQ(pair_force(cfg, vec(0.3, 0.1), vec(0.3, 0.1)), vec(0, 0));
  EXPECT_EQ(pair_force(cfg, vec(0, 0), vec(0.5, 0)), vec(0.5, 0));
}

TEST(PairForce, BranchesAgreeAtCutoff) {
  for (double R : {0.5, 1.0, 2.0}) {
    FlowConfig cfg;
    cfg.cutoff_R = R;
    const Vector outer = vec(R, 0) / (R * R * R);
    EXPECT_EQ(pair_force(cfg, vec(0, 0), vec(R, 0)), outer);
    const Vector just_inside = pair_force(cfg, vec(0, 0), vec(std::nextafter(R, 0.0), 0));
    EXPECT_LT((just_inside - outer).norm(), 1e-14);
  }
}

TEST(FlowStep, SinglePairHandValue) {
  const FlowConfig cfg;  // M1=100, M2=50, dt=0.1, R=1, n=2
  const FlowStep s = flow_step(cfg, rows({{1, 0}}), rows({{0, 0}}));
  EXPECT_EQ(s.particles, rows({{-9, 0}}));
  EXPECT_EQ(s.max_displacement, 10.0);
}

TEST(FlowStep, ZeroMobilitiesLeaveParticlesUnchanged) {
  FlowConfig cfg;
  cfg.mobility_M1 = 0.0;
  cfg.mobility_M2 = 0.0;
  Rng rng(1);
  const SampleBatch p = rng.normal_matrix(10, 2);
  EXPECT_EQ(flow_step(cfg, p, rng.normal_matrix(5, 2)).particles, p);
}

TEST(FlowStep, SelfForcesConserveCentroid) {
  FlowConfig cfg;
  cfg.mobility_M1 = 0.0;
  Rng rng(2);
  SampleBatch p = rng.normal_matrix(32, 2);
  const RowVector start = p.colwise().mean();
  const SampleBatch data = rows({{0.0, 0.0}});
  for (int step = 0; step < 500; ++step) p = flow_step(cfg, p, data).particles;
  EXPECT_LT((p.colwise().mean() - start).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(FlowStep, SymmetricParticlesAboutLoneDataPoint) {
  FlowConfig cfg;
  cfg.mobility_M1 = 0.0;
  const SampleBatch p = rows({{1, 0}, {-1, 0}, {0, 2}, {0, -2}});
  const SampleBatch next = flow_step(cfg, p, rows({{0, 0}})).particles;
  EXPECT_LT(next.colwise().mean().norm(), 1e-15);
}

TEST(FlowStep, RejectsNonFinite) {
  const FlowConfig cfg;
  EXPECT_THROW(flow_step(cfg, rows({{0, 0}}), rows({{0, 0, 0}})), std::invalid_argument);
}

TEST(RunFlow, ZeroStepsAndDeterminism) {
  FlowConfig cfg;
  cfg.total_steps = 0;
  Rng rng(3);
  const SampleBatch init = initial_particles(cfg.n2, 2, rng);
  Rng r1(4);
  const FlowResult zero = run_flow(cfg, init, mixture_sampler(spec_two_mode()), r1);
  EXPECT_EQ(zero.particles, init);
  ASSERT_EQ(zero.energy.size(), 1u);

  cfg.total_steps = 50;
  cfg.record_every = 10;
  cfg.mobility_M1 = cfg.mobility_M2 = 20.0;
  Rng a(5), b(5);
  const FlowResult x = run_flow(cfg, init, mixture_sampler(spec_two_mode()), a);
  const FlowResult y = run_flow(cfg, init, mixture_sampler(spec_two_mode()), b);
  EXPECT_EQ(x.particles, y.particles);
  ASSERT_EQ(x.energy.size(), 6u);
  for (std::size_t i = 0; i < x.energy.size(); ++i) EXPECT_EQ(x.energy[i].energy, y.energy[i].energy);
}

TEST(RunFlow, DivergenceAborts) {
  FlowConfig cfg;
  cfg.mobility_M1 = 0.0;
  cfg.mobility_M2 = 1e9;
  cfg.total_steps = 10;
  const SampleBatch init = rows({{0.0, 0.0}, {0.5, 0.0}});
  Rng rng(6);
  const FlowResult r = run_flow(cfg, init, mixture_sampler(spec_two_mode()), rng);
  ASSERT_TRUE(r.abort.has_value());
  EXPECT_EQ(r.abort->step, 1);
}

TEST(RunFlow, DisplacementGuardOnlyWarns) {
  FlowConfig cfg;  // published mobilities overshoot at unit distances
  cfg.total_steps = 20;
  Rng rng(7);
  const SampleBatch init = initial_particles(cfg.n2, 2, rng);
  const FlowResult r = run_flow(cfg, init, mixture_sampler(spec_two_mode()), rng);
  EXPECT_FALSE(r.abort.has_value());
  EXPECT_GT(r.displacement_warnings, 0);
  EXPECT_EQ(r.first_warning_step, 1);
}

TEST(RunFlow, EnergyDecreasesDuringTransport) {
  // Step small enough that particles move well under a tenth of the domain
  // diameter per step while they travel from the origin to the two modes.
  FlowConfig cfg;
  cfg.mobility_M1 = cfg.mobility_M2 = 5.0;
  cfg.total_steps = 400;
  cfg.record_every = 10;
  for (std::uint64_t seed : {1, 2, 3}) {
    Rng rng(seed);
    const SampleBatch init = initial_particles(cfg.n2, 2, rng);
    const FlowResult r = run_flow(cfg, init, mixture_sampler(spec_two_mode()), rng);
    ASSERT_FALSE(r.abort.has_value());
    int windows = 0, decreasing = 0;
    for (std::size_t i = 1; i < r.energy.size(); ++i) {
      ++windows;
      decreasing += r.energy[i].energy < r.energy[i - 1].energy ? 1 : 0;
    }
    EXPECT_GE(decreasing, 0.9 * windows) << "seed " << seed << ": " << decreasing << "/" << windows;
  }
}
