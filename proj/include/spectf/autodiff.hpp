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

#ifndef SPECTF_AUTODIFF_HPP_
#define SPECTF_AUTODIFF_HPP_

// Tape-based reverse-mode differentiation over spectf::Tensor.
//
// Every op appends one node holding its forward value and a closure that
// scatters the node's adjoint into its inputs. backward() replays the
// closures in exact reverse execution order. A tape belongs to one thread.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "spectf/tensor.hpp"

namespace spectf {

class Tape;

// Handle to one node of a tape. Cheap to copy; valid while the tape lives.
class Var {
 public:
  Var() = default;
  const Tensor& value() const;
  Tape& tape() const { return *tape_; }
  std::size_t id() const { return id_; }

 private:
  friend class Tape;
  Var(Tape* tape, std::size_t id) : tape_(tape), id_(id) {}
  Tape* tape_ = nullptr;
  std::size_t id_ = 0;
};

class Tape {
 public:
  using Backward = std::function<void(Tape&, std::size_t self)>;

  // With record=false no closures or adjoints are kept; the tape then only
  // evaluates forward values (inference).
  explicit Tape(bool record = true) : record_(record) {}
  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return record_; }

  // Leaf whose value is borrowed from `external`; the caller keeps it alive
  // and unchanged until the tape is gone.
  Var parameter(const Tensor& external);
  Var constant(Tensor value);

  // Reverse sweep seeded with d(loss)/d(loss) = 1. Throws ContractError
  // unless `loss` holds exactly one value and the tape is recording.
  void backward(Var loss);

  // d(loss)/d(v) after backward(); an all-zero tensor for nodes the loss
  // does not depend on.
  Tensor gradient(Var v) const;

  // Node ids visited by the last backward(), in visit order.
  const std::vector<std::size_t>& backward_trace() const { return trace_; }
  std::size_t size() const { return nodes_.size(); }

  // --- op-author interface -------------------------------------------------
  Var push(Tensor value, std::vector<std::size_t> inputs, Backward backward);
  const Tensor& value(std::size_t id) const;
  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }
  const std::vector<std::size_t>& inputs(std::size_t id) const {
    return nodes_[id].inputs;
  }
  const Tensor& adjoint(std::size_t id) const { return nodes_[id].grad; }
  // Adjoint accumulator of node `id`, zero-initialized on first use.
  Tensor& accumulate(std::size_t id);

 private:
  struct Node {
    Tensor owned;
    const Tensor* external = nullptr;
    std::vector<std::size_t> inputs;
    Backward backward;
    Tensor grad;
    bool requires_grad = false;
  };

  bool record_;
  std::vector<Node> nodes_;
  std::vector<std::size_t> trace_;
};

// Differentiable ops. Inputs must live on the same tape.
namespace ag {

Var matmul(Var a, Var b);
// a * b^T
Var matmul_nt(Var a, Var b);
Var add(Var a, Var b);
Var scale(Var x, double factor);
// x[n x in] * w[in x out] + bias[out], bias broadcast over rows.
Var linear(Var x, Var w, Var bias);
Var tanh(Var x);
Var gelu(Var x);
Var softmax_rows(Var x);
Var layer_norm(Var x, Var gain, Var bias, double eps = kLayerNormEps);
// Elementwise product with a constant mask (inverted dropout).
Var mask(Var x, Tensor keep_scale);
// Column-wise maximum over rows, [n x d] -> [1 x d]. Ties route the
// gradient to the lowest row index.
Var max_rows(Var x);
Var concat_cols(std::span<const Var> parts);
// Scaled dot-product attention over `heads` column blocks of q, k and v
// (each [n x heads*dh]). Output block h is (M_h .* softmax(q_h k_h^T * scale)) v_h
// where M_h = keep_scale[h], or all ones when keep_scale is empty. The
// pre-mask weights and the scaled logits of each head are appended to
// `weights_out` / `logits_out` when those are non-null.
Var multi_head_attention(Var q, Var k, Var v, std::size_t heads, double scale,
                         std::vector<Tensor> keep_scale = {},
                         std::vector<Tensor>* weights_out = nullptr,
                         std::vector<Tensor>* logits_out = nullptr);
Var sum(Var x);
// Mean over rows of -log(max(p[row, label[row]], 1e-12)).
Var mean_nll(Var probs, std::span<const int> labels);

}  // namespace ag

inline constexpr double kProbabilityFloor = 1e-12;

}  // namespace spectf

#endif  // SPECTF_AUTODIFF_HPP_
