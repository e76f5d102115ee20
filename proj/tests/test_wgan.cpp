#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "tomoforge/error.hpp"
#include "tomoforge/metrics.hpp"
#include "tomoforge/nn/checkpoint.hpp"
#include "tomoforge/nn/wgan.hpp"

using namespace tomoforge;
using namespace tomoforge::nn;

namespace {

const TrainingDataset& vacuum32() {
  static const TrainingDataset ds = assemble_dataset({QuantumState::fock(0)}, std::nullopt,
                                                     ColormapId::SequentialLinear, TomogramGrid::square(32));
  return ds;
}

TrainConfig quick(long epochs, Lipschitz l = Lipschitz::WeightClip) {
  TrainConfig tc = TrainConfig::desk();
  tc.epochs = epochs;
  tc.lipschitz = l;
  tc.batch_size = 4;
  tc.seed = 11;
  return tc;
}

TrainResult run(const TrainConfig& tc) {
  return train(vacuum32(), NetworkConfig::generator(Scale::Desk32), NetworkConfig::critic(Scale::Desk32), tc);
}

std::string bytes(const TrainedModel& m) {
  std::stringstream ss;
  write_checkpoint(ss, m);
  return ss.str();
}

}  // namespace

TEST(TrainConfig, DeskDefaultsAndValidation) {
  const auto tc = TrainConfig::desk();
  EXPECT_EQ(tc.batch_size, 16);
  EXPECT_EQ(tc.critic_steps_per_gen, 5);
  EXPECT_EQ(tc.adam.lr, 1e-4);
  EXPECT_EQ(tc.adam.beta1, 0.0);
  EXPECT_EQ(tc.adam.beta2, 0.9);
  TrainConfig bad = tc;
  bad.batch_size = 0;
  EXPECT_THROW(bad.validate(), ArgumentError);
  bad = tc;
  bad.epochs = -1;
  EXPECT_THROW(bad.validate(), ArgumentError);
  bad = tc;
  bad.clip = 0;
  EXPECT_THROW(bad.validate(), ArgumentError);
}

TEST(Training, ZeroEpochsReturnsInitialization) {
  const auto result = run(quick(0));
  const auto init = init_model(NetworkConfig::generator(Scale::Desk32), NetworkConfig::critic(Scale::Desk32), 11);
  EXPECT_EQ(bytes(result.model), bytes(init));
  EXPECT_TRUE(result.log.rows.empty());
}

TEST(Training, BitReproducibleForSeed) {
  const auto a = run(quick(3, Lipschitz::GradientPenalty));
  const auto b = run(quick(3, Lipschitz::GradientPenalty));
  EXPECT_TRUE(a.log.same_trajectory(b.log));
  EXPECT_EQ(bytes(a.model), bytes(b.model));
  auto other = quick(3, Lipschitz::GradientPenalty);
  other.seed = 12;
  EXPECT_FALSE(run(other).log.same_trajectory(a.log));
}

TEST(Training, WeightClipBoundsEveryCriticParameter) {
  auto tc = quick(2);
  tc.clip = 0.005;
  auto result = run(tc);
  for (Param* p : result.model.critic.params()) {
    for (double v : p->value) EXPECT_LE(std::abs(v), 0.005);
  }
  ASSERT_EQ(result.log.rows.size(), 2u);
  EXPECT_EQ(result.log.rows[1].epoch, 2);
  EXPECT_EQ(result.model.epochs_trained, 2);
}

TEST(Training, LogRowsAreConsistent) {
  const auto result = run(quick(2, Lipschitz::GradientPenalty));
  for (const auto& r : result.log.rows) {
    EXPECT_TRUE(std::isfinite(r.critic_loss));
    EXPECT_TRUE(std::isfinite(r.gen_loss));
    EXPECT_GT(r.lipschitz_diag, 0.0);
    EXPECT_GE(r.wallclock_s, 0.0);
  }
}

TEST(Training, DivergenceIsReported) {
  auto tc = quick(5);
  tc.adam.lr = 1e300;
  tc.clip = 1e300;
  try {
    run(tc);
    FAIL() << "expected divergence";
  } catch (const DivergenceError& e) {
    EXPECT_GE(e.epoch(), 1);
  }
}

TEST(TrainLog, CsvRoundTrip) {
  TrainLog log;
  log.rows.push_back({1, -0.5, 0.25, 0.125, 1.0, 0.5});
  log.rows.push_back({2, -0.1 / 3, 1e-17, 3.0, 0.9, 1.5});
  std::stringstream ss;
  log.write_csv(ss);
  EXPECT_EQ(ss.str().substr(0, ss.str().find('\n')), "epoch,critic_loss,gen_loss,duality_gap,lipschitz_diag,wallclock_s");
  const auto back = TrainLog::read_csv(ss);
  EXPECT_TRUE(back.same_trajectory(log));
  EXPECT_EQ(back.rows[1].wallclock_s, 1.5);
}

TEST(Images, TensorRoundTrip) {
  const auto& img = vacuum32().items[0].image;
  const auto t = images_to_tensor({&img, &img});
  EXPECT_EQ(t.shape(), (Shape4{2, 3, 32, 32}));
  for (double v : t.values()) {
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_EQ(tensor_to_image(t, 1, img.colormap).pixels, img.pixels);
}

TEST(Critic, IdenticalBatchesGiveZeroGap) {
  auto model = init_model(NetworkConfig::generator(Scale::Desk32), NetworkConfig::critic(Scale::Desk32), 1);
  const auto& img = vacuum32().items[0].image;
  const auto x = images_to_tensor({&img, &img, &img});
  const auto real = model.critic.forward(x, Mode::Train);
  const auto fake = model.critic.forward(x, Mode::Train);
  EXPECT_EQ(critic_duality_gap(real.values(), fake.values()), 0.0);
}

TEST(Critic, InputGradientNormMatchesFiniteDifference) {
  auto model = init_model(NetworkConfig::generator(Scale::Desk32), NetworkConfig::critic(Scale::Desk32), 2);
  const auto& img = vacuum32().items[0].image;
  Tensor4 x = images_to_tensor({&img});
  const double analytic = input_gradient_norm(model.critic, x);
  double sq = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + 1e-6;
    const double up = model.critic.forward(x, Mode::Train)[0];
    x[i] = keep - 1e-6;
    const double down = model.critic.forward(x, Mode::Train)[0];
    x[i] = keep;
    sq += std::pow((up - down) / 2e-6, 2);
  }
  EXPECT_NEAR(analytic, std::sqrt(sq), 1e-4 * std::sqrt(sq));
}

TEST(Sampling, DeterministicAndSized) {
  auto model = init_model(NetworkConfig::generator(Scale::Desk32), NetworkConfig::critic(Scale::Desk32), 3);
  const auto a = sample(model, 20, 5);
  const auto b = sample(model, 20, 5);
  ASSERT_EQ(a.size(), 20u);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a[i].pixels, b[i].pixels);
  EXPECT_EQ(a[0].width, 32);
  EXPECT_NE(sample(model, 1, 6)[0].pixels, a[0].pixels);
}

TEST(Lipschitz, Names) {
  EXPECT_EQ(lipschitz_from_string("gp"), Lipschitz::GradientPenalty);
  EXPECT_EQ(lipschitz_from_string(to_string(Lipschitz::WeightClip)), Lipschitz::WeightClip);
  EXPECT_THROW(lipschitz_from_string("spectral"), ArgumentError);
}
