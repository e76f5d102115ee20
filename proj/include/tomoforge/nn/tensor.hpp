#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace tomoforge::nn {

struct Shape4 {
  int n = 0, c = 0, h = 0, w = 0;

  std::size_t size() const {
    return static_cast<std::size_t>(n) * static_cast<std::size_t>(c) * static_cast<std::size_t>(h) *
           static_cast<std::size_t>(w);
  }
  std::size_t plane() const { return static_cast<std::size_t>(h) * static_cast<std::size_t>(w); }
  std::string to_string() const;
  bool operator==(const Shape4&) const = default;
};

/// Dense NCHW tensor of doubles.
class Tensor4 {
 public:
  Tensor4() = default;
  explicit Tensor4(Shape4 shape, double fill = 0.0);
  Tensor4(Shape4 shape, std::vector<double> data);

  const Shape4& shape() const { return shape_; }
  std::size_t size() const { return data_.size(); }
  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::vector<double>& values() { return data_; }
  const std::vector<double>& values() const { return data_; }

  double& at(int n, int c, int h, int w) { return data_[offset(n, c, h, w)]; }
  double at(int n, int c, int h, int w) const { return data_[offset(n, c, h, w)]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  /// Pointer to the (n, c) plane.
  double* plane(int n, int c) { return data_.data() + offset(n, c, 0, 0); }
  const double* plane(int n, int c) const { return data_.data() + offset(n, c, 0, 0); }

  /// Samples [first, first + count) as a new tensor.
  Tensor4 batch_slice(int first, int count) const;

  bool operator==(const Tensor4&) const = default;

 private:
  std::size_t offset(int n, int c, int h, int w) const {
    return ((static_cast<std::size_t>(n) * shape_.c + c) * shape_.h + h) * shape_.w + w;
  }

  Shape4 shape_;
  std::vector<double> data_;
};

/// C (m x n) += A (m x k) * B (k x n), all row-major.
void gemm_nn(int m, int n, int k, const double* a, const double* b, double* c);
/// C (m x n) += A^T * B with A stored (k x m).
void gemm_tn(int m, int n, int k, const double* a, const double* b, double* c);
/// C (m x n) += A * B^T with B stored (n x k).
void gemm_nt(int m, int n, int k, const double* a, const double* b, double* c);

/// Unfolds one (channels, h, w) image into a (channels * k * k) x (oh * ow) matrix.
void im2col(const double* img, int channels, int h, int w, int k, int stride, int pad, int oh, int ow,
            double* cols);
/// Adjoint of im2col: accumulates columns back into the image.
void col2im(const double* cols, int channels, int h, int w, int k, int stride, int pad, int oh, int ow,
            double* img);

}  // namespace tomoforge::nn
