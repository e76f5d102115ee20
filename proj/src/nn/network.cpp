#include "tomoforge/nn/network.hpp"

#include "tomoforge/error.hpp"
#include "tomoforge/random.hpp"

namespace tomoforge::nn {

namespace {

constexpr double kInitStd = 0.02;

// ConvT stages with BatchNorm + ReLU between them and Tanh at the end.
std::vector<LayerSpec> generator_layers(int latent, const std::vector<int>& widths) {
  std::vector<LayerSpec> l;
  int in = latent;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    const bool first = i == 0;
    l.push_back(LayerSpec::conv_t(in, widths[i], 4, first ? 1 : 2, first ? 0 : 1));
    l.push_back(LayerSpec::batch_norm(widths[i]));
    l.push_back(LayerSpec::relu());
    in = widths[i];
  }
  l.push_back(LayerSpec::conv_t(in, 3, 4, 2, 1, true));
  l.push_back(LayerSpec::tanh());
  return l;
}

// Conv stages halving the image; InstanceNorm after all but the first, then a
// 4x4 valid convolution down to one score.
std::vector<LayerSpec> critic_layers(const std::vector<int>& widths) {
  std::vector<LayerSpec> l;
  int in = 3;
  for (std::size_t i = 0; i < widths.size(); ++i) {
    const bool first = i == 0;
    l.push_back(LayerSpec::conv(in, widths[i], 4, 2, 1, first));
    if (!first) l.push_back(LayerSpec::instance_norm(widths[i]));
    l.push_back(LayerSpec::leaky_relu());
    in = widths[i];
  }
  l.push_back(LayerSpec::conv(in, 1, 4, 2, 0, true));
  return l;
}

}  // namespace

std::string to_string(Scale s) { return s == Scale::Full128 ? "full128" : "desk32"; }

Scale scale_from_string(const std::string& text) {
  if (text == "full128") return Scale::Full128;
  if (text == "desk32") return Scale::Desk32;
  throw ArgumentError("unknown network scale '" + text + "' (expected full128 or desk32)");
}

std::string to_string(Role r) { return r == Role::Generator ? "generator" : "critic"; }

NetworkConfig NetworkConfig::generator(Scale scale) {
  NetworkConfig c;
  c.role = Role::Generator;
  c.scale = scale;
  if (scale == Scale::Full128) {
    c.in_c = 100;
    c.layers = generator_layers(100, {512, 256, 128, 64, 32});
  } else {
    c.in_c = 32;
    c.layers = generator_layers(32, {128, 64, 32});
  }
  c.in_h = c.in_w = 1;
  return c;
}

NetworkConfig NetworkConfig::critic(Scale scale) {
  NetworkConfig c;
  c.role = Role::Critic;
  c.scale = scale;
  c.in_c = 3;
  if (scale == Scale::Full128) {
    c.in_h = c.in_w = 128;
    c.layers = critic_layers({16, 32, 64, 128, 256});
  } else {
    c.in_h = c.in_w = 32;
    c.layers = critic_layers({4, 8, 16});
  }
  return c;
}

std::vector<Shape4> NetworkConfig::layer_shapes() const {
  if (layers.empty()) throw ArgumentError("network has no layers");
  std::vector<Shape4> shapes;
  Shape4 s = input_shape(1);
  for (const auto& spec : layers) {
    s = make_layer(spec)->output_shape(s);
    shapes.push_back(s);
  }
  return shapes;
}

std::size_t NetworkConfig::parameter_count() const {
  std::size_t total = 0;
  for (const auto& spec : layers) total += spec.parameter_count();
  return total;
}

Network::Network(NetworkConfig config) : config_(std::move(config)) {
  config_.layer_shapes();
  for (const auto& spec : config_.layers) layers_.push_back(make_layer(spec));
}

void Network::initialize(std::uint64_t seed) {
  Rng rng(seed);
  for (auto& layer : layers_) {
    const LayerOp op = layer->spec().op;
    for (Param* p : layer->params()) {
      if ((op == LayerOp::Conv2D || op == LayerOp::ConvT2D) && p->name == "weight") {
        for (double& v : p->value) v = rng.normal(0.0, kInitStd);
      } else {
        std::fill(p->value.begin(), p->value.end(), p->name == "gamma" ? 1.0 : 0.0);
      }
    }
    for (auto* b : layer->buffers()) std::fill(b->begin(), b->end(), 0.0);
    if (op == LayerOp::BatchNorm) {
      auto& bn = static_cast<BatchNorm&>(*layer);
      std::fill(bn.running_var.begin(), bn.running_var.end(), 1.0);
    }
  }
  zero_grad();
}

Tensor4 Network::forward(const Tensor4& x, Mode mode) {
  const Shape4 expected = config_.input_shape(x.shape().n);
  if (!(x.shape() == expected)) {
    throw ArgumentError("network input " + x.shape().to_string() + " does not match " + expected.to_string());
  }
  Tensor4 h = x;
  for (auto& layer : layers_) h = layer->forward(h, mode);
  return h;
}

Tensor4 Network::backward(const Tensor4& grad_out) {
  Tensor4 g = grad_out;
  for (auto it = layers_.rbegin(); it != layers_.rend(); ++it) g = (*it)->backward(g);
  return g;
}

std::vector<Param*> Network::params() {
  std::vector<Param*> out;
  for (auto& layer : layers_) {
    for (Param* p : layer->params()) out.push_back(p);
  }
  return out;
}

std::vector<std::vector<double>*> Network::buffers() {
  std::vector<std::vector<double>*> out;
  for (auto& layer : layers_) {
    for (auto* b : layer->buffers()) out.push_back(b);
  }
  return out;
}

void Network::zero_grad() {
  for (Param* p : params()) std::fill(p->grad.begin(), p->grad.end(), 0.0);
}

Network build_generator(const NetworkConfig& cfg, std::uint64_t seed) {
  if (cfg.role != Role::Generator) throw ArgumentError("configuration does not describe a generator");
  const auto shapes = cfg.layer_shapes();
  if (shapes.back().c != 3 || cfg.in_h != 1 || cfg.in_w != 1) {
    throw ArgumentError("a generator must map a latent vector to a 3-channel image");
  }
  Network net(cfg);
  net.initialize(seed);
  return net;
}

Network build_critic(const NetworkConfig& cfg, std::uint64_t seed) {
  if (cfg.role != Role::Critic) throw ArgumentError("configuration does not describe a critic");
  const auto shapes = cfg.layer_shapes();
  const Shape4& out = shapes.back();
  if (out.c != 1 || out.h != 1 || out.w != 1 || cfg.in_c != 3) {
    throw ArgumentError("a critic must map a 3-channel image to one score");
  }
  Network net(cfg);
  net.initialize(seed);
  return net;
}

}  // namespace tomoforge::nn
