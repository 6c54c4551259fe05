/*
 * Copyright 2026 The SpecTf Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef SPECTF_TENSOR_HPP_
#define SPECTF_TENSOR_HPP_

// Dense row-major tensors (rank 1..3) of doubles and the pure forward
// kernels used by the model code. Gradient-recording versions of these
// kernels live in autodiff.hpp.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace spectf {

using Shape = std::vector<std::size_t>;

std::string shape_to_string(const Shape& shape);

class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  // Row-wise literal, e.g. Tensor::matrix({{1, 2}, {3, 4}}).
  static Tensor matrix(std::initializer_list<std::initializer_list<double>> rows);
  static Tensor vector(std::initializer_list<double> values);
  static Tensor identity(std::size_t n);

  const Shape& shape() const { return shape_; }
  std::size_t rank() const { return shape_.size(); }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // For rank-2 tensors. A rank-1 tensor is viewed as a single row.
  std::size_t rows() const;
  std::size_t cols() const;

  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }
  std::span<double> row(std::size_t i);
  std::span<const double> row(std::size_t i) const;

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }
  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols() + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols() + j]; }

  void fill(double value);
  bool all_finite() const;

  friend bool operator==(const Tensor&, const Tensor&) = default;

 private:
  Shape shape_;
  std::vector<double> data_;
};

// ---------------------------------------------------------------------------
// Forward kernels. All of them validate shapes and throw DimensionError with
// both offending shapes in the message.

// a[m x k] * b[k x p]
Tensor matmul(const Tensor& a, const Tensor& b);
// out[m x p] += a[m x k] * b[k x p] on raw row-major buffers. No checks.
void gemm_accumulate(const double* a, const double* b, double* out, std::size_t m,
                     std::size_t k, std::size_t p);
// out[k x p] += a[m x k]^T * b[m x p] on raw row-major buffers. No checks.
void gemm_tn_accumulate(const double* a, const double* b, double* out, std::size_t m,
                        std::size_t k, std::size_t p);
// a[m x k] * b[p x k]^T
Tensor matmul_nt(const Tensor& a, const Tensor& b);
// a[k x m]^T * b[k x p]
Tensor matmul_tn(const Tensor& a, const Tensor& b);
Tensor transpose(const Tensor& a);

// Numerically stable softmax along `axis` (0 or 1 for matrices, 0 for
// vectors). Throws NumericError on non-finite input.
Tensor softmax(const Tensor& x, std::size_t axis);

inline constexpr double kLayerNormEps = 1e-5;

// Per-row affine layer normalization of x[n x d]; requires d >= 2.
Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                  double eps = kLayerNormEps);

enum class Activation { kTanh, kGelu };

// 0.5 x (1 + tanh(sqrt(2/pi) (x + 0.044715 x^3)))
double gelu(double x);
double gelu_derivative(double x);
Tensor activate(const Tensor& x, Activation kind);

}  // namespace spectf

#endif  // SPECTF_TENSOR_HPP_
