#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "tomoforge/error.hpp"
#include "tomoforge/nn/adam.hpp"
#include "tomoforge/nn/checkpoint.hpp"
#include "tomoforge/nn/network.hpp"
#include "tomoforge/random.hpp"

using namespace tomoforge;
using namespace tomoforge::nn;

namespace {

std::vector<std::size_t> trainable_counts(const NetworkConfig& cfg) {
  std::vector<std::size_t> out;
  for (const auto& l : cfg.layers) {
    if (l.parameter_count() > 0) out.push_back(l.parameter_count());
  }
  return out;
}

std::vector<Shape4> trainable_shapes(const NetworkConfig& cfg) {
  std::vector<Shape4> out;
  const auto shapes = cfg.layer_shapes();
  for (std::size_t i = 0; i < cfg.layers.size(); ++i) {
    if (cfg.layers[i].parameter_count() > 0) out.push_back(shapes[i]);
  }
  return out;
}

}  // namespace

TEST(Architecture, Full128GeneratorTable) {
  const auto g = NetworkConfig::generator(Scale::Full128);
  EXPECT_EQ(g.parameter_count(), 3608003u);
  EXPECT_EQ(trainable_counts(g), (std::vector<std::size_t>{819200, 1024, 2097152, 512, 524288, 256, 131072, 128,
                                                           32768, 64, 1539}));
  const std::vector<Shape4> shapes = {{1, 512, 4, 4},   {1, 512, 4, 4},   {1, 256, 8, 8}, {1, 256, 8, 8},
                                      {1, 128, 16, 16}, {1, 128, 16, 16}, {1, 64, 32, 32}, {1, 64, 32, 32},
                                      {1, 32, 64, 64},  {1, 32, 64, 64},  {1, 3, 128, 128}};
  EXPECT_EQ(trainable_shapes(g), shapes);
  EXPECT_EQ(g.layers.back().op, LayerOp::Tanh);
}

TEST(Architecture, Full128CriticTable) {
  const auto d = NetworkConfig::critic(Scale::Full128);
  EXPECT_EQ(d.parameter_count(), 702161u);
  EXPECT_EQ(trainable_counts(d),
            (std::vector<std::size_t>{784, 8192, 64, 32768, 128, 131072, 256, 524288, 512, 4097}));
  const std::vector<Shape4> shapes = {{1, 16, 64, 64}, {1, 32, 32, 32}, {1, 32, 32, 32}, {1, 64, 16, 16},
                                      {1, 64, 16, 16}, {1, 128, 8, 8},  {1, 128, 8, 8},  {1, 256, 4, 4},
                                      {1, 256, 4, 4},  {1, 1, 1, 1}};
  EXPECT_EQ(trainable_shapes(d), shapes);
}

TEST(Architecture, Full128ForwardShapes) {
  auto g = build_generator(NetworkConfig::generator(Scale::Full128), 1);
  const auto img = g.forward(Tensor4(g.config().input_shape(2), 0.3), Mode::Train);
  EXPECT_EQ(img.shape(), (Shape4{2, 3, 128, 128}));
  auto d = build_critic(NetworkConfig::critic(Scale::Full128), 2);
  EXPECT_EQ(d.forward(img, Mode::Train).shape(), (Shape4{2, 1, 1, 1}));
}

TEST(Architecture, Desk32Shapes) {
  auto g = build_generator(NetworkConfig::generator(Scale::Desk32), 1);
  auto d = build_critic(NetworkConfig::critic(Scale::Desk32), 2);
  const auto img = g.forward(Tensor4(g.config().input_shape(3), 0.1), Mode::Train);
  EXPECT_EQ(img.shape(), (Shape4{3, 3, 32, 32}));
  EXPECT_EQ(d.forward(img, Mode::Train).shape(), (Shape4{3, 1, 1, 1}));
  for (double v : img.values()) {
    EXPECT_LE(std::abs(v), 1.0);
  }
}

TEST(Architecture, RoleAndShapeValidation) {
  EXPECT_THROW(build_generator(NetworkConfig::critic(Scale::Desk32), 0), ArgumentError);
  EXPECT_THROW(build_critic(NetworkConfig::generator(Scale::Desk32), 0), ArgumentError);
  auto g = build_generator(NetworkConfig::generator(Scale::Desk32), 0);
  EXPECT_THROW(g.forward(Tensor4({1, 3, 32, 32}), Mode::Train), ArgumentError);
  auto broken = NetworkConfig::critic(Scale::Desk32);
  broken.layers[0].in_ch = 5;
  EXPECT_THROW(broken.layer_shapes(), ArgumentError);
}

TEST(Network, InitializationIsSeeded) {
  auto a = build_generator(NetworkConfig::generator(Scale::Desk32), 5);
  auto b = build_generator(NetworkConfig::generator(Scale::Desk32), 5);
  auto c = build_generator(NetworkConfig::generator(Scale::Desk32), 6);
  EXPECT_EQ(a.params()[0]->value, b.params()[0]->value);
  EXPECT_NE(a.params()[0]->value, c.params()[0]->value);
  double sum = 0, sq = 0;
  const auto& w = a.params()[0]->value;
  for (double v : w) {
    sum += v;
    sq += v * v;
  }
  EXPECT_NEAR(std::sqrt(sq / w.size() - std::pow(sum / w.size(), 2)), 0.02, 0.002);
}

TEST(Network, WholeNetworkGradientMatchesFiniteDifference) {
  Rng rng(4);
  auto d = build_critic(NetworkConfig::critic(Scale::Desk32), 9);
  Tensor4 x(d.config().input_shape(2));
  for (double& v : x.values()) v = rng.uniform(-1, 1);
  d.zero_grad();
  d.forward(x, Mode::Train);
  const Tensor4 dx = d.backward(Tensor4({2, 1, 1, 1}, 1.0));
  auto loss = [&] {
    const auto y = d.forward(x, Mode::Train);
    return y[0] + y[1];
  };
  for (int trial = 0; trial < 20; ++trial) {
    const auto i = rng.below(x.size());
    const double keep = x[i];
    x[i] = keep + 1e-5;
    const double up = loss();
    x[i] = keep - 1e-5;
    const double down = loss();
    x[i] = keep;
    const double numeric = (up - down) / 2e-5;
    EXPECT_NEAR(dx[i], numeric, 1e-4 * std::max(1e-3, std::abs(numeric)));
  }
}

TEST(Adam, FirstStepMovesBySignTimesLearningRate) {
  Param p("w", 3);
  p.value = {1.0, -2.0, 0.5};
  p.grad = {0.3, -7.0, 0.0};
  Adam opt({&p});
  opt.step();
  EXPECT_NEAR(p.value[0], 1.0 - 1e-4, 1e-10);
  EXPECT_NEAR(p.value[1], -2.0 + 1e-4, 1e-10);
  EXPECT_EQ(p.value[2], 0.5);
  EXPECT_EQ(opt.steps(), 1);
}

TEST(Adam, SecondStepUsesBiasCorrectedSecondMoment) {
  Param p("w", 1);
  p.value = {0.0};
  Adam opt({&p}, AdamConfig{0.1, 0.0, 0.9, 0.0});
  p.grad = {1.0};
  opt.step();
  p.grad = {2.0};
  opt.step();
  const double v = 0.9 * 0.1 * 1.0 + 0.1 * 4.0;
  const double vhat = v / (1 - 0.81);
  EXPECT_NEAR(p.value[0], -0.1 - 0.1 * 2.0 / std::sqrt(vhat), 1e-12);
}

TEST(Checkpoint, RoundTripPreservesEverything) {
  auto model = init_model(NetworkConfig::generator(Scale::Desk32), NetworkConfig::critic(Scale::Desk32), 3,
                          ColormapId::Nonlinear);
  model.epochs_trained = 17;
  model.generator.forward(Tensor4(model.generator.config().input_shape(4), 0.2), Mode::Train);
  std::stringstream ss;
  write_checkpoint(ss, model);
  const std::string bytes = ss.str();
  auto back = read_checkpoint(ss);
  EXPECT_EQ(back.epochs_trained, 17);
  EXPECT_EQ(back.colormap, ColormapId::Nonlinear);
  EXPECT_EQ(back.generator.config(), model.generator.config());
  EXPECT_EQ(back.critic.config(), model.critic.config());
  for (std::size_t i = 0; i < model.generator.params().size(); ++i) {
    EXPECT_EQ(back.generator.params()[i]->value, model.generator.params()[i]->value);
  }
  for (std::size_t i = 0; i < model.generator.buffers().size(); ++i) {
    EXPECT_EQ(*back.generator.buffers()[i], *model.generator.buffers()[i]);
  }
  std::stringstream again;
  write_checkpoint(again, back);
  EXPECT_EQ(again.str(), bytes);
}

TEST(Checkpoint, CorruptInputIsFormatError) {
  std::stringstream bad("NOTACKPT");
  EXPECT_THROW(read_checkpoint(bad), FormatError);
  auto model = init_model(NetworkConfig::generator(Scale::Desk32), NetworkConfig::critic(Scale::Desk32), 3);
  std::stringstream ss;
  write_checkpoint(ss, model);
  std::string bytes = ss.str();
  bytes.resize(bytes.size() - 100);
  std::stringstream cut(bytes);
  EXPECT_THROW(read_checkpoint(cut), FormatError);
}
