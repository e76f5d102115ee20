#include "tomoforge/nn/layers.hpp"

#include <cmath>

#include "tomoforge/error.hpp"

namespace tomoforge::nn {

namespace {

void check_channels(const Shape4& in, int expected, const char* what) {
  if (in.c != expected) {
    throw ArgumentError(std::string(what) + " expects " + std::to_string(expected) +
                        " input channels, got shape " + in.to_string());
  }
}

int kk(const LayerSpec& s) { return s.kernel * s.kernel; }

}  // namespace

std::string to_string(LayerOp op) {
  switch (op) {
    case LayerOp::ConvT2D:
      return "ConvT2D";
    case LayerOp::Conv2D:
      return "Conv2D";
    case LayerOp::BatchNorm:
      return "BatchNorm";
    case LayerOp::InstanceNorm:
      return "InstanceNorm";
    case LayerOp::LeakyReLU:
      return "LeakyReLU";
    case LayerOp::ReLU:
      return "ReLU";
    case LayerOp::Tanh:
      return "Tanh";
  }
  return {};
}

LayerOp layer_op_from_string(const std::string& text) {
  for (const LayerOp op : {LayerOp::ConvT2D, LayerOp::Conv2D, LayerOp::BatchNorm, LayerOp::InstanceNorm,
                           LayerOp::LeakyReLU, LayerOp::ReLU, LayerOp::Tanh}) {
    if (to_string(op) == text) return op;
  }
  throw FormatError("unknown layer op '" + text + "'");
}

LayerSpec LayerSpec::conv(int in, int out, int k, int s, int p, bool bias) {
  return {LayerOp::Conv2D, k, s, p, in, out, bias};
}

LayerSpec LayerSpec::conv_t(int in, int out, int k, int s, int p, bool bias) {
  return {LayerOp::ConvT2D, k, s, p, in, out, bias};
}

LayerSpec LayerSpec::batch_norm(int channels) { return {LayerOp::BatchNorm, 0, 1, 0, channels, channels, false}; }

LayerSpec LayerSpec::instance_norm(int channels) {
  return {LayerOp::InstanceNorm, 0, 1, 0, channels, channels, false};
}

LayerSpec LayerSpec::leaky_relu() { return {LayerOp::LeakyReLU, 0, 1, 0, 0, 0, false}; }
LayerSpec LayerSpec::relu() { return {LayerOp::ReLU, 0, 1, 0, 0, 0, false}; }
LayerSpec LayerSpec::tanh() { return {LayerOp::Tanh, 0, 1, 0, 0, 0, false}; }

std::size_t LayerSpec::parameter_count() const {
  switch (op) {
    case LayerOp::Conv2D:
    case LayerOp::ConvT2D:
      return static_cast<std::size_t>(in_ch) * out_ch * kernel * kernel + (has_bias ? out_ch : 0);
    case LayerOp::BatchNorm:
    case LayerOp::InstanceNorm:
      return 2 * static_cast<std::size_t>(out_ch);
    default:
      return 0;
  }
}

void Layer::require_forward() const {
  if (!has_forward_) throw ContractError(to_string(spec_.op) + " backward called before forward");
}

std::unique_ptr<Layer> make_layer(const LayerSpec& spec) {
  switch (spec.op) {
    case LayerOp::Conv2D:
      return std::make_unique<Conv2D>(spec);
    case LayerOp::ConvT2D:
      return std::make_unique<ConvT2D>(spec);
    case LayerOp::BatchNorm:
      return std::make_unique<BatchNorm>(spec);
    case LayerOp::InstanceNorm:
      return std::make_unique<InstanceNorm>(spec);
    case LayerOp::LeakyReLU:
    case LayerOp::ReLU:
    case LayerOp::Tanh:
      return std::make_unique<Activation>(spec);
  }
  throw ArgumentError("unknown layer op");
}

// Conv2D

Conv2D::Conv2D(const LayerSpec& spec)
    : Layer(spec),
      weight("weight", static_cast<std::size_t>(spec.out_ch) * spec.in_ch * kk(spec)),
      bias("bias", spec.has_bias ? spec.out_ch : 0) {
  if (spec.kernel <= 0 || spec.stride <= 0 || spec.padding < 0 || spec.in_ch <= 0 || spec.out_ch <= 0) {
    throw ArgumentError("invalid Conv2D specification");
  }
}

Shape4 Conv2D::output_shape(const Shape4& in) const {
  const auto& s = spec();
  check_channels(in, s.in_ch, "Conv2D");
  const int oh = (in.h + 2 * s.padding - s.kernel) / s.stride + 1;
  const int ow = (in.w + 2 * s.padding - s.kernel) / s.stride + 1;
  if (in.h + 2 * s.padding < s.kernel || in.w + 2 * s.padding < s.kernel) {
    throw ArgumentError("Conv2D input " + in.to_string() + " smaller than its kernel");
  }
  return {in.n, s.out_ch, oh, ow};
}

Tensor4 Conv2D::forward(const Tensor4& x, Mode) {
  const auto& s = spec();
  const Shape4 os = output_shape(x.shape());
  const Shape4& is = x.shape();
  const int rows = s.in_ch * kk(s);
  const int cols = os.h * os.w;
  Tensor4 y(os);
  cols_.assign(static_cast<std::size_t>(is.n) * rows * cols, 0.0);
  for (int n = 0; n < is.n; ++n) {
    double* c = cols_.data() + static_cast<std::size_t>(n) * rows * cols;
    im2col(x.plane(n, 0), s.in_ch, is.h, is.w, s.kernel, s.stride, s.padding, os.h, os.w, c);
    gemm_nn(s.out_ch, cols, rows, weight.value.data(), c, y.plane(n, 0));
    if (s.has_bias) {
      for (int o = 0; o < s.out_ch; ++o) {
        double* p = y.plane(n, o);
        for (int q = 0; q < cols; ++q) p[q] += bias.value[o];
      }
    }
  }
  input_ = x;
  has_forward_ = true;
  return y;
}

Tensor4 Conv2D::backward(const Tensor4& grad_out) {
  require_forward();
  const auto& s = spec();
  const Shape4& is = input_.shape();
  const Shape4 os = output_shape(is);
  if (!(grad_out.shape() == os)) throw ArgumentError("Conv2D gradient shape mismatch");
  const int rows = s.in_ch * kk(s);
  const int cols = os.h * os.w;
  Tensor4 dx(is);
  std::vector<double> dcols(static_cast<std::size_t>(rows) * cols);
  for (int n = 0; n < is.n; ++n) {
    const double* c = cols_.data() + static_cast<std::size_t>(n) * rows * cols;
    const double* g = grad_out.plane(n, 0);
    gemm_nt(s.out_ch, rows, cols, g, c, weight.grad.data());
    if (s.has_bias) {
      for (int o = 0; o < s.out_ch; ++o) {
        const double* p = grad_out.plane(n, o);
        double sum = 0.0;
        for (int q = 0; q < cols; ++q) sum += p[q];
        bias.grad[o] += sum;
      }
    }
    std::fill(dcols.begin(), dcols.end(), 0.0);
    gemm_tn(rows, cols, s.out_ch, weight.value.data(), g, dcols.data());
    col2im(dcols.data(), s.in_ch, is.h, is.w, s.kernel, s.stride, s.padding, os.h, os.w, dx.plane(n, 0));
  }
  return dx;
}

std::vector<Param*> Conv2D::params() {
  if (spec().has_bias) return {&weight, &bias};
  return {&weight};
}

// ConvT2D

ConvT2D::ConvT2D(const LayerSpec& spec)
    : Layer(spec),
      weight("weight", static_cast<std::size_t>(spec.in_ch) * spec.out_ch * kk(spec)),
      bias("bias", spec.has_bias ? spec.out_ch : 0) {
  if (spec.kernel <= 0 || spec.stride <= 0 || spec.padding < 0 || spec.in_ch <= 0 || spec.out_ch <= 0) {
    throw ArgumentError("invalid ConvT2D specification");
  }
}

Shape4 ConvT2D::output_shape(const Shape4& in) const {
  const auto& s = spec();
  check_channels(in, s.in_ch, "ConvT2D");
  const int oh = (in.h - 1) * s.stride - 2 * s.padding + s.kernel;
  const int ow = (in.w - 1) * s.stride - 2 * s.padding + s.kernel;
  if (oh <= 0 || ow <= 0) throw ArgumentError("ConvT2D output would be empty for " + in.to_string());
  return {in.n, s.out_ch, oh, ow};
}

Tensor4 ConvT2D::forward(const Tensor4& x, Mode) {
  const auto& s = spec();
  const Shape4 os = output_shape(x.shape());
  const Shape4& is = x.shape();
  const int rows = s.out_ch * kk(s);
  const int cols = is.h * is.w;
  Tensor4 y(os);
  std::vector<double> c(static_cast<std::size_t>(rows) * cols);
  for (int n = 0; n < is.n; ++n) {
    std::fill(c.begin(), c.end(), 0.0);
    gemm_tn(rows, cols, s.in_ch, weight.value.data(), x.plane(n, 0), c.data());
    col2im(c.data(), s.out_ch, os.h, os.w, s.kernel, s.stride, s.padding, is.h, is.w, y.plane(n, 0));
    if (s.has_bias) {
      for (int o = 0; o < s.out_ch; ++o) {
        double* p = y.plane(n, o);
        for (std::size_t q = 0; q < os.plane(); ++q) p[q] += bias.value[o];
      }
    }
  }
  input_ = x;
  out_shape_ = os;
  has_forward_ = true;
  return y;
}

Tensor4 ConvT2D::backward(const Tensor4& grad_out) {
  require_forward();
  const auto& s = spec();
  const Shape4& is = input_.shape();
  if (!(grad_out.shape() == out_shape_)) throw ArgumentError("ConvT2D gradient shape mismatch");
  const Shape4& os = out_shape_;
  const int rows = s.out_ch * kk(s);
  const int cols = is.h * is.w;
  Tensor4 dx(is);
  std::vector<double> dcols(static_cast<std::size_t>(rows) * cols);
  for (int n = 0; n < is.n; ++n) {
    im2col(grad_out.plane(n, 0), s.out_ch, os.h, os.w, s.kernel, s.stride, s.padding, is.h, is.w, dcols.data());
    gemm_nn(s.in_ch, cols, rows, weight.value.data(), dcols.data(), dx.plane(n, 0));
    gemm_nt(s.in_ch, rows, cols, input_.plane(n, 0), dcols.data(), weight.grad.data());
    if (s.has_bias) {
      for (int o = 0; o < s.out_ch; ++o) {
        const double* p = grad_out.plane(n, o);
        double sum = 0.0;
        for (std::size_t q = 0; q < os.plane(); ++q) sum += p[q];
        bias.grad[o] += sum;
      }
    }
  }
  return dx;
}

std::vector<Param*> ConvT2D::params() {
  if (spec().has_bias) return {&weight, &bias};
  return {&weight};
}

// BatchNorm

BatchNorm::BatchNorm(const LayerSpec& spec)
    : Layer(spec),
      gamma("gamma", spec.out_ch),
      beta("beta", spec.out_ch),
      running_mean(spec.out_ch, 0.0),
      running_var(spec.out_ch, 1.0) {
  if (spec.out_ch <= 0) throw ArgumentError("invalid BatchNorm specification");
  std::fill(gamma.value.begin(), gamma.value.end(), 1.0);
}

Tensor4 BatchNorm::forward(const Tensor4& x, Mode mode) {
  const Shape4& sh = x.shape();
  check_channels(sh, spec().out_ch, "BatchNorm");
  const std::size_t plane = sh.plane();
  const double count = static_cast<double>(sh.n) * static_cast<double>(plane);
  Tensor4 y(sh);
  xhat_ = Tensor4(sh);
  inv_std_.assign(sh.c, 0.0);
  mode_ = mode;
  for (int c = 0; c < sh.c; ++c) {
    double mean = running_mean[c], var = running_var[c];
    if (mode == Mode::Train) {
      if (count < 2) throw ArgumentError("BatchNorm training needs more than one value per channel");
      double sum = 0.0;
      for (int n = 0; n < sh.n; ++n) {
        const double* p = x.plane(n, c);
        for (std::size_t q = 0; q < plane; ++q) sum += p[q];
      }
      mean = sum / count;
      double ss = 0.0;
      for (int n = 0; n < sh.n; ++n) {
        const double* p = x.plane(n, c);
        for (std::size_t q = 0; q < plane; ++q) ss += (p[q] - mean) * (p[q] - mean);
      }
      var = ss / count;
      running_mean[c] = (1.0 - momentum) * running_mean[c] + momentum * mean;
      running_var[c] = (1.0 - momentum) * running_var[c] + momentum * ss / (count - 1.0);
    }
    const double inv = 1.0 / std::sqrt(var + eps);
    inv_std_[c] = inv;
    for (int n = 0; n < sh.n; ++n) {
      const double* p = x.plane(n, c);
      double* h = xhat_.plane(n, c);
      double* o = y.plane(n, c);
      for (std::size_t q = 0; q < plane; ++q) {
        h[q] = (p[q] - mean) * inv;
        o[q] = gamma.value[c] * h[q] + beta.value[c];
      }
    }
  }
  has_forward_ = true;
  return y;
}

Tensor4 BatchNorm::backward(const Tensor4& grad_out) {
  require_forward();
  const Shape4& sh = xhat_.shape();
  if (!(grad_out.shape() == sh)) throw ArgumentError("BatchNorm gradient shape mismatch");
  const std::size_t plane = sh.plane();
  const double count = static_cast<double>(sh.n) * static_cast<double>(plane);
  Tensor4 dx(sh);
  for (int c = 0; c < sh.c; ++c) {
    double sum_g = 0.0, sum_gh = 0.0;
    for (int n = 0; n < sh.n; ++n) {
      const double* g = grad_out.plane(n, c);
      const double* h = xhat_.plane(n, c);
      for (std::size_t q = 0; q < plane; ++q) {
        sum_g += g[q];
        sum_gh += g[q] * h[q];
      }
    }
    gamma.grad[c] += sum_gh;
    beta.grad[c] += sum_g;
    const double gm = gamma.value[c];
    const double inv = inv_std_[c];
    for (int n = 0; n < sh.n; ++n) {
      const double* g = grad_out.plane(n, c);
      const double* h = xhat_.plane(n, c);
      double* d = dx.plane(n, c);
      if (mode_ == Mode::Eval) {
        for (std::size_t q = 0; q < plane; ++q) d[q] = gm * inv * g[q];
      } else {
        for (std::size_t q = 0; q < plane; ++q) {
          d[q] = gm * inv / count * (count * g[q] - sum_g - h[q] * sum_gh);
        }
      }
    }
  }
  return dx;
}

// InstanceNorm

InstanceNorm::InstanceNorm(const LayerSpec& spec)
    : Layer(spec), gamma("gamma", spec.out_ch), beta("beta", spec.out_ch) {
  if (spec.out_ch <= 0) throw ArgumentError("invalid InstanceNorm specification");
  std::fill(gamma.value.begin(), gamma.value.end(), 1.0);
}

Tensor4 InstanceNorm::forward(const Tensor4& x, Mode) {
  const Shape4& sh = x.shape();
  check_channels(sh, spec().out_ch, "InstanceNorm");
  const std::size_t plane = sh.plane();
  if (plane < 2) throw ArgumentError("InstanceNorm needs more than one value per plane");
  Tensor4 y(sh);
  xhat_ = Tensor4(sh);
  inv_std_.assign(static_cast<std::size_t>(sh.n) * sh.c, 0.0);
  for (int n = 0; n < sh.n; ++n) {
    for (int c = 0; c < sh.c; ++c) {
      const double* p = x.plane(n, c);
      double mean = 0.0;
      for (std::size_t q = 0; q < plane; ++q) mean += p[q];
      mean /= static_cast<double>(plane);
      double var = 0.0;
      for (std::size_t q = 0; q < plane; ++q) var += (p[q] - mean) * (p[q] - mean);
      var /= static_cast<double>(plane);
      const double inv = 1.0 / std::sqrt(var + eps);
      inv_std_[static_cast<std::size_t>(n) * sh.c + c] = inv;
      double* h = xhat_.plane(n, c);
      double* o = y.plane(n, c);
      for (std::size_t q = 0; q < plane; ++q) {
        h[q] = (p[q] - mean) * inv;
        o[q] = gamma.value[c] * h[q] + beta.value[c];
      }
    }
  }
  has_forward_ = true;
  return y;
}

Tensor4 InstanceNorm::backward(const Tensor4& grad_out) {
  require_forward();
  const Shape4& sh = xhat_.shape();
  if (!(grad_out.shape() == sh)) throw ArgumentError("InstanceNorm gradient shape mismatch");
  const std::size_t plane = sh.plane();
  const double count = static_cast<double>(plane);
  Tensor4 dx(sh);
  for (int n = 0; n < sh.n; ++n) {
    for (int c = 0; c < sh.c; ++c) {
      const double* g = grad_out.plane(n, c);
      const double* h = xhat_.plane(n, c);
      double sum_g = 0.0, sum_gh = 0.0;
      for (std::size_t q = 0; q < plane; ++q) {
        sum_g += g[q];
        sum_gh += g[q] * h[q];
      }
      gamma.grad[c] += sum_gh;
      beta.grad[c] += sum_g;
      const double scale = gamma.value[c] * inv_std_[static_cast<std::size_t>(n) * sh.c + c] / count;
      double* d = dx.plane(n, c);
      for (std::size_t q = 0; q < plane; ++q) d[q] = scale * (count * g[q] - sum_g - h[q] * sum_gh);
    }
  }
  return dx;
}

// Activations

Activation::Activation(const LayerSpec& spec) : Layer(spec) {
  if (spec.op != LayerOp::LeakyReLU && spec.op != LayerOp::ReLU && spec.op != LayerOp::Tanh) {
    throw ArgumentError("not an activation layer");
  }
}

Tensor4 Activation::forward(const Tensor4& x, Mode) {
  Tensor4 y(x.shape());
  const std::size_t size = x.size();
  switch (spec().op) {
    case LayerOp::LeakyReLU:
      for (std::size_t i = 0; i < size; ++i) y[i] = x[i] > 0.0 ? x[i] : kLeakySlope * x[i];
      break;
    case LayerOp::ReLU:
      for (std::size_t i = 0; i < size; ++i) y[i] = x[i] > 0.0 ? x[i] : 0.0;
      break;
    default:
      for (std::size_t i = 0; i < size; ++i) y[i] = std::tanh(x[i]);
      break;
  }
  input_ = x;
  output_ = y;
  has_forward_ = true;
  return y;
}

Tensor4 Activation::backward(const Tensor4& grad_out) {
  require_forward();
  if (!(grad_out.shape() == input_.shape())) throw ArgumentError("activation gradient shape mismatch");
  Tensor4 dx(input_.shape());
  const std::size_t size = dx.size();
  switch (spec().op) {
    case LayerOp::LeakyReLU:
      for (std::size_t i = 0; i < size; ++i) dx[i] = input_[i] > 0.0 ? grad_out[i] : kLeakySlope * grad_out[i];
      break;
    case LayerOp::ReLU:
      for (std::size_t i = 0; i < size; ++i) dx[i] = input_[i] > 0.0 ? grad_out[i] : 0.0;
      break;
    default:
      for (std::size_t i = 0; i < size; ++i) dx[i] = (1.0 - output_[i] * output_[i]) * grad_out[i];
      break;
  }
  return dx;
}

}  // namespace tomoforge::nn
