#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "tomoforge/nn/layers.hpp"
#include "tomoforge/random.hpp"

// Backprop versus central finite differences on randomized small layers.
namespace tomoforge::testing {

using namespace tomoforge::nn;

constexpr int kTrials = 100;
constexpr double kStep = 1e-5;
constexpr double kTolerance = 1e-4;

inline void fill_normal(std::vector<double>& v, Rng& rng, double scale = 1.0) {
  for (double& x : v) x = scale * rng.normal();
}

// Keeps samples away from activation kinks so central differences stay smooth.
inline void push_off_zero(std::vector<double>& v) {
  for (double& x : v) {
    if (std::abs(x) < 0.05) x = x < 0 ? x - 0.05 : x + 0.05;
  }
}

inline double dot(const Tensor4& a, const Tensor4& b) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm_diff_ratio(const std::vector<double>& analytic, const std::vector<double>& numeric) {
  double diff = 0, ref = 0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff += (analytic[i] - numeric[i]) * (analytic[i] - numeric[i]);
    ref += numeric[i] * numeric[i] + analytic[i] * analytic[i];
  }
  if (ref == 0.0) return 0.0;
  return std::sqrt(diff) / std::sqrt(0.5 * ref);
}

// Worst relative error between backprop and central differences of sum(g * layer(x))
// over the input and every parameter.
inline double gradient_error(Layer& layer, Tensor4 x, const Tensor4& g, Mode mode) {
  for (Param* p : layer.params()) std::fill(p->grad.begin(), p->grad.end(), 0.0);
  layer.forward(x, mode);
  const Tensor4 dx = layer.backward(g);

  auto loss = [&] { return dot(layer.forward(x, mode), g); };
  double worst = 0;
  std::vector<double> numeric(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double keep = x[i];
    x[i] = keep + kStep;
    const double up = loss();
    x[i] = keep - kStep;
    const double down = loss();
    x[i] = keep;
    numeric[i] = (up - down) / (2 * kStep);
  }
  worst = std::max(worst, norm_diff_ratio(dx.values(), numeric));
  for (Param* p : layer.params()) {
    std::vector<double> pn(p->value.size());
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double keep = p->value[i];
      p->value[i] = keep + kStep;
      const double up = loss();
      p->value[i] = keep - kStep;
      const double down = loss();
      p->value[i] = keep;
      pn[i] = (up - down) / (2 * kStep);
    }
    worst = std::max(worst, norm_diff_ratio(p->grad, pn));
  }
  return worst;
}

struct Case {
  LayerSpec spec;
  Shape4 in;
};

inline double run_trials(const std::function<Case(Rng&)>& make, Mode mode, bool kinked, std::uint64_t seed,
                  const std::function<void(Layer&, Rng&)>& prepare = {}) {
  Rng rng(seed);
  double worst = 0;
  for (int trial = 0; trial < kTrials; ++trial) {
    const Case c = make(rng);
    auto layer = make_layer(c.spec);
    for (Param* p : layer->params()) fill_normal(p->value, rng, 0.5);
    if (prepare) prepare(*layer, rng);
    Tensor4 x(c.in);
    fill_normal(x.values(), rng);
    if (kinked) push_off_zero(x.values());
    Tensor4 g(layer->output_shape(c.in));
    fill_normal(g.values(), rng);
    worst = std::max(worst, gradient_error(*layer, x, g, mode));
  }
  return worst;
}

inline int pick(Rng& rng, int lo, int hi) { return lo + static_cast<int>(rng.below(hi - lo + 1)); }

inline Case conv_case(Rng& rng, bool transposed) {
  const int k = pick(rng, 1, 4), s = pick(rng, 1, 2), p = pick(rng, 0, std::min(1, k - 1));
  const int in_c = pick(rng, 1, 3), out_c = pick(rng, 1, 3);
  const bool bias = rng.below(2) == 1;
  const int h = transposed ? pick(rng, p > 0 ? 2 : 1, 4) : pick(rng, k, 6);
  const int w = transposed ? pick(rng, p > 0 ? 2 : 1, 4) : pick(rng, k, 6);
  const int n = pick(rng, 1, 2);
  const auto spec = transposed ? LayerSpec::conv_t(in_c, out_c, k, s, p, bias) : LayerSpec::conv(in_c, out_c, k, s, p, bias);
  return {spec, {n, in_c, h, w}};
}

inline Case norm_case(Rng& rng, bool batch) {
  const int c = pick(rng, 1, 3);
  const int n = batch ? pick(rng, 2, 3) : pick(rng, 1, 2);
  return {batch ? LayerSpec::batch_norm(c) : LayerSpec::instance_norm(c), {n, c, pick(rng, 2, 4), pick(rng, 2, 4)}};
}

inline Case activation_case(Rng& rng, LayerSpec spec) { return {spec, {pick(rng, 1, 2), pick(rng, 1, 3), pick(rng, 1, 4), pick(rng, 1, 4)}}; }


/// Worst error per layer kind over kTrials random cases each.
inline std::vector<std::pair<std::string, double>> gradient_suite() {
  auto stats = [](Layer& l, Rng& rng) {
    auto& bn = dynamic_cast<BatchNorm&>(l);
    fill_normal(bn.running_mean, rng);
    for (double& v : bn.running_var) v = 0.5 + rng.uniform();
  };
  return {
      {"Conv2D", run_trials([](Rng& r) { return conv_case(r, false); }, Mode::Train, false, 1)},
      {"ConvT2D", run_trials([](Rng& r) { return conv_case(r, true); }, Mode::Train, false, 2)},
      {"BatchNorm(train)", run_trials([](Rng& r) { return norm_case(r, true); }, Mode::Train, false, 3)},
      {"BatchNorm(eval)", run_trials([](Rng& r) { return norm_case(r, true); }, Mode::Eval, false, 4, stats)},
      {"InstanceNorm", run_trials([](Rng& r) { return norm_case(r, false); }, Mode::Train, false, 5)},
      {"LeakyReLU", run_trials([](Rng& r) { return activation_case(r, LayerSpec::leaky_relu()); }, Mode::Train, true, 6)},
      {"ReLU", run_trials([](Rng& r) { return activation_case(r, LayerSpec::relu()); }, Mode::Train, true, 7)},
      {"Tanh", run_trials([](Rng& r) { return activation_case(r, LayerSpec::tanh()); }, Mode::Train, false, 8)},
  };
}

}  // namespace tomoforge::testing
