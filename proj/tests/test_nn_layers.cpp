#include <gtest/gtest.h>

#include <cmath>

#include "tomoforge/error.hpp"
#include "tomoforge/nn/layers.hpp"
#include "tomoforge/random.hpp"
#include "support/gradcheck.hpp"

using namespace tomoforge;
using namespace tomoforge::nn;

using namespace tomoforge::testing;

TEST(LayerGradients, Conv2D) {
  EXPECT_LT(run_trials([](Rng& r) { return conv_case(r, false); }, Mode::Train, false, 1), kTolerance);
}

TEST(LayerGradients, ConvT2D) {
  EXPECT_LT(run_trials([](Rng& r) { return conv_case(r, true); }, Mode::Train, false, 2), kTolerance);
}

TEST(LayerGradients, BatchNormTrain) {
  EXPECT_LT(run_trials([](Rng& r) { return norm_case(r, true); }, Mode::Train, false, 3), kTolerance);
}

TEST(LayerGradients, BatchNormEval) {
  auto stats = [](Layer& l, Rng& rng) {
    auto& bn = dynamic_cast<BatchNorm&>(l);
    fill_normal(bn.running_mean, rng);
    for (double& v : bn.running_var) v = 0.5 + rng.uniform();
  };
  EXPECT_LT(run_trials([](Rng& r) { return norm_case(r, true); }, Mode::Eval, false, 4, stats), kTolerance);
}

TEST(LayerGradients, InstanceNorm) {
  EXPECT_LT(run_trials([](Rng& r) { return norm_case(r, false); }, Mode::Train, false, 5), kTolerance);
}

TEST(LayerGradients, LeakyReLU) {
  EXPECT_LT(run_trials([](Rng& r) { return activation_case(r, LayerSpec::leaky_relu()); }, Mode::Train, true, 6),
            kTolerance);
}

TEST(LayerGradients, ReLU) {
  EXPECT_LT(run_trials([](Rng& r) { return activation_case(r, LayerSpec::relu()); }, Mode::Train, true, 7),
            kTolerance);
}

TEST(LayerGradients, Tanh) {
  EXPECT_LT(run_trials([](Rng& r) { return activation_case(r, LayerSpec::tanh()); }, Mode::Train, false, 8),
            kTolerance);
}

TEST(Layers, BackwardWithoutForwardIsContractError) {
  for (const auto& spec : {LayerSpec::conv(1, 1, 3, 1, 1), LayerSpec::conv_t(1, 1, 4, 2, 1), LayerSpec::batch_norm(1),
                           LayerSpec::instance_norm(1), LayerSpec::tanh()}) {
    auto layer = make_layer(spec);
    EXPECT_THROW(layer->backward(Tensor4({1, 1, 4, 4})), ContractError) << to_string(spec.op);
  }
}

TEST(Layers, OutputShapes) {
  EXPECT_EQ(make_layer(LayerSpec::conv(3, 4, 4, 2, 1))->output_shape({2, 3, 32, 32}), (Shape4{2, 4, 16, 16}));
  EXPECT_EQ(make_layer(LayerSpec::conv(8, 1, 4, 2, 0))->output_shape({1, 8, 4, 4}), (Shape4{1, 1, 1, 1}));
  EXPECT_EQ(make_layer(LayerSpec::conv_t(100, 512, 4, 1, 0))->output_shape({1, 100, 1, 1}), (Shape4{1, 512, 4, 4}));
  EXPECT_EQ(make_layer(LayerSpec::conv_t(64, 32, 4, 2, 1))->output_shape({1, 64, 32, 32}), (Shape4{1, 32, 64, 64}));
}

TEST(Layers, ConvolutionKnownValues) {
  auto layer = make_layer(LayerSpec::conv(1, 1, 2, 1, 0, true));
  auto& conv = dynamic_cast<Conv2D&>(*layer);
  conv.weight.value = {1, 2, 3, 4};
  conv.bias.value = {0.5};
  const Tensor4 x({1, 1, 2, 3}, {1, 2, 3, 4, 5, 6});
  const auto y = layer->forward(x, Mode::Train);
  EXPECT_EQ(y.values(), (std::vector<double>{1 + 4 + 12 + 20 + 0.5, 2 + 6 + 15 + 24 + 0.5}));
}

TEST(Layers, TransposedConvolutionIsAdjointOfConvolution) {
  Rng rng(17);
  auto conv = make_layer(LayerSpec::conv(2, 3, 4, 2, 1));
  auto convt = make_layer(LayerSpec::conv_t(3, 2, 4, 2, 1));
  fill_normal(dynamic_cast<Conv2D&>(*conv).weight.value, rng);
  dynamic_cast<ConvT2D&>(*convt).weight.value = dynamic_cast<Conv2D&>(*conv).weight.value;
  Tensor4 x({1, 2, 8, 8}), y({1, 3, 4, 4});
  fill_normal(x.values(), rng);
  fill_normal(y.values(), rng);
  EXPECT_NEAR(dot(conv->forward(x, Mode::Train), y), dot(x, convt->forward(y, Mode::Train)), 1e-12);
}

TEST(Layers, BatchNormRunningStatistics) {
  auto layer = make_layer(LayerSpec::batch_norm(1));
  auto& bn = dynamic_cast<BatchNorm&>(*layer);
  const Tensor4 x({4, 1, 1, 1}, {1, 2, 3, 4});
  layer->forward(x, Mode::Train);
  EXPECT_NEAR(bn.running_mean[0], 0.1 * 2.5, 1e-15);
  EXPECT_NEAR(bn.running_var[0], 0.9 + 0.1 * (5.0 / 3.0), 1e-15);
  const auto y = layer->forward(x, Mode::Eval);
  EXPECT_NEAR(y[0], (1 - 0.25) / std::sqrt(bn.running_var[0] + 1e-5), 1e-12);
}

TEST(Layers, LayerOpNames) {
  for (auto op : {LayerOp::ConvT2D, LayerOp::Conv2D, LayerOp::BatchNorm, LayerOp::InstanceNorm, LayerOp::LeakyReLU,
                  LayerOp::ReLU, LayerOp::Tanh}) {
    EXPECT_EQ(layer_op_from_string(to_string(op)), op);
  }
}
