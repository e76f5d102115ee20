#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "tomoforge/nn/layers.hpp"

namespace tomoforge::nn {

enum class Scale { Full128, Desk32 };
enum class Role { Generator, Critic };

std::string to_string(Scale s);
Scale scale_from_string(const std::string& text);
std::string to_string(Role r);

struct NetworkConfig {
  Role role = Role::Generator;
  Scale scale = Scale::Full128;
  std::vector<LayerSpec> layers;
  /// Per-sample input shape: (latent, 1, 1) for generators, (3, H, W) for critics.
  int in_c = 0, in_h = 0, in_w = 0;

  /// Full128: latent 100 -> (3, 128, 128). Desk32: latent 32 -> (3, 32, 32).
  static NetworkConfig generator(Scale scale);
  static NetworkConfig critic(Scale scale);

  Shape4 input_shape(int batch) const { return {batch, in_c, in_h, in_w}; }
  /// Output shape of every layer for a batch of one. Throws ArgumentError when
  /// the layer chain is inconsistent.
  std::vector<Shape4> layer_shapes() const;
  std::size_t parameter_count() const;
  bool operator==(const NetworkConfig&) const = default;
};

class Network {
 public:
  /// Builds the layers with identity normalization and zero parameters.
  explicit Network(NetworkConfig config);

  /// Conv weights ~ N(0, 0.02^2), biases 0, norm layers identity.
  void initialize(std::uint64_t seed);

  const NetworkConfig& config() const { return config_; }
  std::size_t size() const { return layers_.size(); }
  Layer& layer(std::size_t i) { return *layers_[i]; }
  const Layer& layer(std::size_t i) const { return *layers_[i]; }

  Tensor4 forward(const Tensor4& x, Mode mode);
  /// Backpropagates through the last forward; returns the input gradient.
  Tensor4 backward(const Tensor4& grad_out);

  std::vector<Param*> params();
  std::vector<std::vector<double>*> buffers();
  void zero_grad();
  std::size_t parameter_count() const { return config_.parameter_count(); }

 private:
  NetworkConfig config_;
  std::vector<std::unique_ptr<Layer>> layers_;
};

/// Throws ArgumentError when cfg does not describe a generator (critic).
Network build_generator(const NetworkConfig& cfg, std::uint64_t seed);
Network build_critic(const NetworkConfig& cfg, std::uint64_t seed);

}  // namespace tomoforge::nn
