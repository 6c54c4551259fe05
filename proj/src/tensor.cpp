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

#include "spectf/tensor.hpp"

#include <algorithm>
#include <bit>
#include <cstdint>
#include <cmath>
#include <cstring>
#include <functional>
#include <numbers>
#include <numeric>

#include "spectf/error.hpp"

namespace spectf {
namespace {

std::size_t element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                         std::multiplies<>());
}

void validate_shape(const Shape& shape) {
  if (shape.empty() || shape.size() > 3) {
    throw DimensionError("tensor rank must be 1..3, got shape " +
                         shape_to_string(shape));
  }
  for (std::size_t extent : shape) {
    if (extent == 0) {
      throw DimensionError("tensor extents must be positive, got shape " +
                           shape_to_string(shape));
    }
  }
}

void require_matrix(const Tensor& t, const char* op) {
  if (t.rank() != 2) {
    throw DimensionError(std::string(op) + " expects a matrix, got shape " +
                         shape_to_string(t.shape()));
  }
}

void require_finite(const Tensor& x, const char* op) {
  if (!x.all_finite()) {
    throw NumericError(std::string(op) + ": non-finite input");
  }
}

}  // namespace

namespace {

// exp(z) for z <= 0, branch-free so softmax rows vectorize. Cody-Waite
// reduction z = k ln2 + r with |r| <= ln2 / 2, then a degree-13 Taylor
// polynomial; agrees with std::exp to a few ulp. Arguments below -708 are
// clamped, which keeps the result a normal positive double.
inline double exp_nonpositive(double z) {
  constexpr double kShift = 6755399441055744.0;  // 1.5 * 2^52: rounds to integer
  constexpr double kLog2e = 1.4426950408889634;
  constexpr double kLn2Hi = 6.93147180369123816490e-01;
  constexpr double kLn2Lo = 1.90821492927058770002e-10;
  // For z <= 0 the bit patterns order like magnitudes, so an unsigned min
  // is max(z, -708) and keeps the loop free of branches.
  z = std::bit_cast<double>(
      std::min(std::bit_cast<std::uint64_t>(z), std::bit_cast<std::uint64_t>(-708.0)));
  const double t = z * kLog2e + kShift;
  const double k = t - kShift;
  const double r = (z - k * kLn2Hi) - k * kLn2Lo;
  double p = 1.0 / 6227020800.0;
  p = p * r + 1.0 / 479001600.0;
  p = p * r + 1.0 / 39916800.0;
  p = p * r + 1.0 / 3628800.0;
  p = p * r + 1.0 / 362880.0;
  p = p * r + 1.0 / 40320.0;
  p = p * r + 1.0 / 5040.0;
  p = p * r + 1.0 / 720.0;
  p = p * r + 1.0 / 120.0;
  p = p * r + 1.0 / 24.0;
  p = p * r + 1.0 / 6.0;
  p = p * r + 0.5;
  p = p * r + 1.0;
  p = p * r + 1.0;
  const std::int64_t ki =
      std::bit_cast<std::int64_t>(t) - std::bit_cast<std::int64_t>(kShift);
  return p * std::bit_cast<double>((ki + 1023) << 52);
}

// out[m x p] += A * b with A [m x k] row-major, or, when kTransposed, A
// stored as its transpose [k x m]. Output tiles of kRows x kCols live in a
// local accumulator; each output element still sums its k terms in index
// order, so the result does not depend on the tiling.
constexpr std::size_t kRows = 4;
constexpr std::size_t kCols = 8;

template <bool kTransposed>
inline double a_at(const double* a, std::size_t m, std::size_t k, std::size_t i, std::size_t kk) {
  return kTransposed ? a[kk * m + i] : a[i * k + kk];
}

using Lane4 = double __attribute__((vector_size(32)));

inline Lane4 load4(const double* p) {
  Lane4 v;
  std::memcpy(&v, p, sizeof v);
  return v;
}

inline void add_store4(double* p, Lane4 v) {
  Lane4 o = load4(p);
  o += v;
  std::memcpy(p, &o, sizeof o);
}

template <bool kTransposed>
void gemm_kernel(const double* __restrict a, const double* __restrict b, double* __restrict out,
                 std::size_t m, std::size_t k, std::size_t p) {
  static_assert(kCols == 8);
  const std::size_t m_full = m - m % kRows;
  const std::size_t p_full = p - p % kCols;
  for (std::size_t i0 = 0; i0 < m_full; i0 += kRows) {
    for (std::size_t j0 = 0; j0 < p_full; j0 += kCols) {
      Lane4 acc[kRows][2] = {};
      for (std::size_t kk = 0; kk < k; ++kk) {
        const Lane4 b0 = load4(b + kk * p + j0);
        const Lane4 b1 = load4(b + kk * p + j0 + 4);
        for (std::size_t r = 0; r < kRows; ++r) {
          const double s = a_at<kTransposed>(a, m, k, i0 + r, kk);
          acc[r][0] += s * b0;
          acc[r][1] += s * b1;
        }
      }
      for (std::size_t r = 0; r < kRows; ++r) {
        add_store4(out + (i0 + r) * p + j0, acc[r][0]);
        add_store4(out + (i0 + r) * p + j0 + 4, acc[r][1]);
      }
    }
    for (std::size_t r = 0; r < kRows; ++r) {
      for (std::size_t j = p_full; j < p; ++j) {
        double acc = 0.0;
        for (std::size_t kk = 0; kk < k; ++kk) acc += a_at<kTransposed>(a, m, k, i0 + r, kk) * b[kk * p + j];
        out[(i0 + r) * p + j] += acc;
      }
    }
  }
  for (std::size_t i = m_full; i < m; ++i) {
    for (std::size_t j = 0; j < p; ++j) {
      double acc = 0.0;
      for (std::size_t kk = 0; kk < k; ++kk) acc += a_at<kTransposed>(a, m, k, i, kk) * b[kk * p + j];
      out[i * p + j] += acc;
    }
  }
}

}  // namespace

void gemm_accumulate(const double* a, const double* b, double* out, std::size_t m,
                     std::size_t k, std::size_t p) {
  gemm_kernel<false>(a, b, out, m, k, p);
}

void gemm_tn_accumulate(const double* a, const double* b, double* out, std::size_t m,
                        std::size_t k, std::size_t p) {
  // Here a is [m x k] and the product is a^T b, i.e. A = a^T stored transposed.
  gemm_kernel<true>(a, b, out, k, m, p);
}

std::string shape_to_string(const Shape& shape) {
  std::string out = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) out += "x";
    out += std::to_string(shape[i]);
  }
  return out + "]";
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  validate_shape(shape_);
  data_.assign(element_count(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  validate_shape(shape_);
  if (element_count(shape_) != data_.size()) {
    throw DimensionError("shape " + shape_to_string(shape_) + " needs " +
                         std::to_string(element_count(shape_)) +
                         " values, got " + std::to_string(data_.size()));
  }
}

Tensor Tensor::matrix(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  const std::size_t d = n ? rows.begin()->size() : 0;
  std::vector<double> data;
  data.reserve(n * d);
  for (const auto& r : rows) {
    if (r.size() != d) throw DimensionError("ragged matrix literal");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Tensor({n, d}, std::move(data));
}

Tensor Tensor::vector(std::initializer_list<double> values) {
  return Tensor({values.size()}, std::vector<double>(values));
}

Tensor Tensor::identity(std::size_t n) {
  Tensor t({n, n});
  for (std::size_t i = 0; i < n; ++i) t(i, i) = 1.0;
  return t;
}

std::size_t Tensor::rows() const {
  if (rank() == 1) return 1;
  if (rank() == 2) return shape_[0];
  throw DimensionError("rows() on rank-3 tensor " + shape_to_string(shape_));
}

std::size_t Tensor::cols() const {
  if (rank() == 1) return shape_[0];
  if (rank() == 2) return shape_[1];
  throw DimensionError("cols() on rank-3 tensor " + shape_to_string(shape_));
}

std::span<double> Tensor::row(std::size_t i) {
  const std::size_t c = cols();
  return std::span<double>(data_).subspan(i * c, c);
}

std::span<const double> Tensor::row(std::size_t i) const {
  const std::size_t c = cols();
  return std::span<const double>(data_).subspan(i * c, c);
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Tensor::all_finite() const {
  // A double is inf or NaN exactly when its exponent bits are all set.
  constexpr std::uint64_t kExponent = 0x7ff0000000000000ULL;
  std::uint64_t bad = 0;
  for (double v : data_) bad |= (std::bit_cast<std::uint64_t>(v) & kExponent) == kExponent;
  return bad == 0;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul");
  require_matrix(b, "matmul");
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: inner extents differ for " +
                         shape_to_string(a.shape()) + " x " +
                         shape_to_string(b.shape()));
  }
  Tensor out({a.rows(), b.cols()});
  gemm_accumulate(a.data().data(), b.data().data(), out.data().data(), a.rows(),
          a.cols(), b.cols());
  return out;
}

Tensor matmul_nt(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul_nt");
  require_matrix(b, "matmul_nt");
  if (a.cols() != b.cols()) {
    throw DimensionError("matmul_nt: inner extents differ for " +
                         shape_to_string(a.shape()) + " x " +
                         shape_to_string(b.shape()) + "^T");
  }
  const Tensor bt = transpose(b);
  Tensor out({a.rows(), b.rows()});
  gemm_accumulate(a.data().data(), bt.data().data(), out.data().data(), a.rows(),
          a.cols(), b.rows());
  return out;
}

Tensor matmul_tn(const Tensor& a, const Tensor& b) {
  require_matrix(a, "matmul_tn");
  require_matrix(b, "matmul_tn");
  if (a.rows() != b.rows()) {
    throw DimensionError("matmul_tn: inner extents differ for " +
                         shape_to_string(a.shape()) + "^T x " +
                         shape_to_string(b.shape()));
  }
  Tensor out({a.cols(), b.cols()});
  gemm_tn_accumulate(a.data().data(), b.data().data(), out.data().data(), a.rows(), a.cols(),
                     b.cols());
  return out;
}

Tensor transpose(const Tensor& a) {
  require_matrix(a, "transpose");
  const std::size_t m = a.rows(), n = a.cols();
  Tensor out({n, m});
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < n; ++j) out(j, i) = a(i, j);
  return out;
}

Tensor softmax(const Tensor& x, std::size_t axis) {
  require_finite(x, "softmax");
  if (x.rank() > 2 || axis >= x.rank()) {
    throw DimensionError("softmax: axis " + std::to_string(axis) +
                         " invalid for shape " + shape_to_string(x.shape()));
  }
  Tensor out = x;
  const std::size_t rows = x.rows(), cols = x.cols();
  // Lines along the reduction axis: (count, stride between elements,
  // stride between lines).
  const bool along_rows = (x.rank() == 1) || axis == 1;
  const std::size_t lines = along_rows ? rows : cols;
  const std::size_t length = along_rows ? cols : rows;
  const std::size_t step = along_rows ? 1 : cols;
  const std::size_t line_step = along_rows ? cols : 1;
  double* d = out.data().data();
  for (std::size_t l = 0; l < lines; ++l) {
    double* base = d + l * line_step;
    double peak = base[0];
    for (std::size_t i = 1; i < length; ++i) peak = std::max(peak, base[i * step]);
    double total = 0.0;
    if (step == 1) {
      for (std::size_t i = 0; i < length; ++i) base[i] = exp_nonpositive(base[i] - peak);
      // Eight interleaved partial sums, combined in a fixed order.
      double lanes[8] = {};
      const std::size_t full = length - length % 8;
      for (std::size_t i = 0; i < full; i += 8) {
        for (std::size_t c = 0; c < 8; ++c) lanes[c] += base[i + c];
      }
      for (std::size_t i = full; i < length; ++i) lanes[i - full] += base[i];
      total = ((lanes[0] + lanes[1]) + (lanes[2] + lanes[3])) +
              ((lanes[4] + lanes[5]) + (lanes[6] + lanes[7]));
    } else {
      for (std::size_t i = 0; i < length; ++i) {
        base[i * step] = exp_nonpositive(base[i * step] - peak);
        total += base[i * step];
      }
    }
    if (step == 1) {
      for (std::size_t i = 0; i < length; ++i) base[i] /= total;
    } else {
      for (std::size_t i = 0; i < length; ++i) base[i * step] /= total;
    }
  }
  return out;
}

Tensor layer_norm(const Tensor& x, const Tensor& gain, const Tensor& bias,
                  double eps) {
  const std::size_t n = x.rows(), d = x.cols();
  if (x.rank() > 2) {
    throw DimensionError("layer_norm expects a matrix, got " +
                         shape_to_string(x.shape()));
  }
  if (d < 2) {
    throw DimensionError("layer_norm: degenerate normalization over d=" +
                         std::to_string(d) + " features");
  }
  if (gain.size() != d || bias.size() != d) {
    throw DimensionError("layer_norm: affine parameters " +
                         shape_to_string(gain.shape()) + ", " +
                         shape_to_string(bias.shape()) + " do not match " +
                         shape_to_string(x.shape()));
  }
  Tensor out = x;
  for (std::size_t i = 0; i < n; ++i) {
    auto r = out.row(i);
    double mean = 0.0;
    for (double v : r) mean += v;
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (double v : r) var += (v - mean) * (v - mean);
    var /= static_cast<double>(d);
    const double inv_std = 1.0 / std::sqrt(var + eps);
    for (std::size_t j = 0; j < d; ++j)
      r[j] = gain[j] * (r[j] - mean) * inv_std + bias[j];
  }
  return out;
}

namespace {
constexpr double kGeluC = 0.7978845608028654;  // sqrt(2/pi)
constexpr double kGeluA = 0.044715;
}  // namespace

double gelu(double x) {
  return 0.5 * x * (1.0 + std::tanh(kGeluC * (x + kGeluA * x * x * x)));
}

double gelu_derivative(double x) {
  const double inner = kGeluC * (x + kGeluA * x * x * x);
  const double t = std::tanh(inner);
  const double d_inner = kGeluC * (1.0 + 3.0 * kGeluA * x * x);
  return 0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * d_inner;
}

Tensor activate(const Tensor& x, Activation kind) {
  require_finite(x, "activation");
  Tensor out = x;
  for (double& v : out.data()) {
    v = kind == Activation::kTanh ? std::tanh(v) : gelu(v);
  }
  return out;
}

}  // namespace spectf
