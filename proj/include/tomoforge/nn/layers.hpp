#pragma once

#include <memory>
#include <string>
#include <vector>

#include "tomoforge/nn/tensor.hpp"

namespace tomoforge::nn {

enum class LayerOp { ConvT2D, Conv2D, BatchNorm, InstanceNorm, LeakyReLU, ReLU, Tanh };

std::string to_string(LayerOp op);
LayerOp layer_op_from_string(const std::string& text);

/// Conv layers use (kernel, stride, padding, in_ch, out_ch, has_bias); norm
/// layers use out_ch as the channel count.
struct LayerSpec {
  LayerOp op = LayerOp::Conv2D;
  int kernel = 0;
  int stride = 1;
  int padding = 0;
  int in_ch = 0;
  int out_ch = 0;
  bool has_bias = false;

  static LayerSpec conv(int in, int out, int k, int s, int p, bool bias = false);
  static LayerSpec conv_t(int in, int out, int k, int s, int p, bool bias = false);
  static LayerSpec batch_norm(int channels);
  static LayerSpec instance_norm(int channels);
  static LayerSpec leaky_relu();
  static LayerSpec relu();
  static LayerSpec tanh();

  std::size_t parameter_count() const;
  bool operator==(const LayerSpec&) const = default;
};

enum class Mode { Train, Eval };

/// Trainable array with its accumulated gradient.
struct Param {
  std::string name;
  std::vector<double> value;
  std::vector<double> grad;

  explicit Param(std::string n = {}, std::size_t size = 0) : name(std::move(n)), value(size, 0.0), grad(size, 0.0) {}
};

class Layer {
 public:
  explicit Layer(LayerSpec spec) : spec_(spec) {}
  virtual ~Layer() = default;

  const LayerSpec& spec() const { return spec_; }

  virtual Shape4 output_shape(const Shape4& in) const = 0;
  /// Records what backward needs.
  virtual Tensor4 forward(const Tensor4& x, Mode mode) = 0;
  /// Gradient w.r.t. the input of the last forward; parameter gradients are
  /// accumulated into Param::grad. Throws ContractError without a recorded forward.
  virtual Tensor4 backward(const Tensor4& grad_out) = 0;

  virtual std::vector<Param*> params() { return {}; }
  /// Non-trainable state saved with checkpoints (BatchNorm running statistics).
  virtual std::vector<std::vector<double>*> buffers() { return {}; }

 protected:
  void require_forward() const;
  bool has_forward_ = false;

 private:
  LayerSpec spec_;
};

std::unique_ptr<Layer> make_layer(const LayerSpec& spec);

class Conv2D : public Layer {
 public:
  explicit Conv2D(const LayerSpec& spec);
  Shape4 output_shape(const Shape4& in) const override;
  Tensor4 forward(const Tensor4& x, Mode mode) override;
  Tensor4 backward(const Tensor4& grad_out) override;
  std::vector<Param*> params() override;

  Param weight;  // (out, in, k, k)
  Param bias;    // (out) when has_bias

 private:
  Tensor4 input_;
  std::vector<double> cols_;
};

class ConvT2D : public Layer {
 public:
  explicit ConvT2D(const LayerSpec& spec);
  Shape4 output_shape(const Shape4& in) const override;
  Tensor4 forward(const Tensor4& x, Mode mode) override;
  Tensor4 backward(const Tensor4& grad_out) override;
  std::vector<Param*> params() override;

  Param weight;  // (in, out, k, k)
  Param bias;    // (out) when has_bias

 private:
  Tensor4 input_;
  Shape4 out_shape_;
};

class BatchNorm : public Layer {
 public:
  explicit BatchNorm(const LayerSpec& spec);
  Shape4 output_shape(const Shape4& in) const override { return in; }
  Tensor4 forward(const Tensor4& x, Mode mode) override;
  Tensor4 backward(const Tensor4& grad_out) override;
  std::vector<Param*> params() override { return {&gamma, &beta}; }
  std::vector<std::vector<double>*> buffers() override { return {&running_mean, &running_var}; }

  Param gamma, beta;
  std::vector<double> running_mean, running_var;
  double momentum = 0.1;
  double eps = 1e-5;

 private:
  Mode mode_ = Mode::Train;
  Tensor4 xhat_;
  std::vector<double> inv_std_;
};

class InstanceNorm : public Layer {
 public:
  explicit InstanceNorm(const LayerSpec& spec);
  Shape4 output_shape(const Shape4& in) const override { return in; }
  Tensor4 forward(const Tensor4& x, Mode mode) override;
  Tensor4 backward(const Tensor4& grad_out) override;
  std::vector<Param*> params() override { return {&gamma, &beta}; }

  Param gamma, beta;
  double eps = 1e-5;

 private:
  Tensor4 xhat_;
  std::vector<double> inv_std_;  // per (n, c)
};

/// LeakyReLU (slope 0.2), ReLU and Tanh.
class Activation : public Layer {
 public:
  explicit Activation(const LayerSpec& spec);
  Shape4 output_shape(const Shape4& in) const override { return in; }
  Tensor4 forward(const Tensor4& x, Mode mode) override;
  Tensor4 backward(const Tensor4& grad_out) override;

  static constexpr double kLeakySlope = 0.2;

 private:
  Tensor4 input_;
  Tensor4 output_;
};

}  // namespace tomoforge::nn
