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

#include "spectf/autodiff.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spectf/error.hpp"

namespace spectf {

const Tensor& Var::value() const {
  if (!tape_) throw ContractError("Var is not bound to a tape");
  return tape_->value(id_);
}

Var Tape::parameter(const Tensor& external) {
  Node node;
  node.external = &external;
  node.requires_grad = record_;
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::constant(Tensor value) {
  Node node;
  node.owned = std::move(value);
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

Var Tape::push(Tensor value, std::vector<std::size_t> inputs, Backward backward) {
  Node node;
  node.owned = std::move(value);
  if (record_) {
    node.requires_grad = std::any_of(inputs.begin(), inputs.end(),
                                     [&](std::size_t i) { return nodes_[i].requires_grad; });
    if (node.requires_grad) {
      node.inputs = std::move(inputs);
      node.backward = std::move(backward);
    }
  }
  nodes_.push_back(std::move(node));
  return Var(this, nodes_.size() - 1);
}

const Tensor& Tape::value(std::size_t id) const {
  const Node& node = nodes_.at(id);
  return node.external ? *node.external : node.owned;
}

Tensor& Tape::accumulate(std::size_t id) {
  Node& node = nodes_[id];
  if (node.grad.empty()) node.grad = Tensor(value(id).shape());
  return node.grad;
}

void Tape::backward(Var loss) {
  if (!record_) throw ContractError("backward() on a non-recording tape");
  if (&loss.tape() != this) throw ContractError("loss belongs to another tape");
  if (value(loss.id()).size() != 1) {
    throw ContractError("backward() needs a scalar loss, got shape " +
                        shape_to_string(value(loss.id()).shape()));
  }
  for (Node& node : nodes_) node.grad = Tensor();
  trace_.clear();
  accumulate(loss.id()).fill(1.0);
  for (std::size_t id = loss.id() + 1; id-- > 0;) {
    Node& node = nodes_[id];
    if (node.grad.empty() || !node.backward) continue;
    trace_.push_back(id);
    node.backward(*this, id);
  }
}

Tensor Tape::gradient(Var v) const {
  const Node& node = nodes_.at(v.id());
  if (node.grad.empty()) return Tensor(value(v.id()).shape());
  return node.grad;
}

namespace ag {
namespace {

void same_tape(Var a, Var b) {
  if (&a.tape() != &b.tape()) throw ContractError("operands live on different tapes");
}

void add_into(Tensor& dst, const Tensor& src) {
  auto d = dst.data();
  auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

Tensor as_matrix(const Tensor& t) {
  if (t.rank() == 2) return t;
  return Tensor({t.rows(), t.cols()}, std::vector<double>(t.data().begin(), t.data().end()));
}

}  // namespace

Var matmul(Var a, Var b) {
  same_tape(a, b);
  Tape& t = a.tape();
  return t.push(spectf::matmul(a.value(), b.value()), {a.id(), b.id()},
                [](Tape& tp, std::size_t self) {
                  const auto& in = tp.inputs(self);
                  const Tensor& g = tp.adjoint(self);
                  if (tp.requires_grad(in[0]))
                    add_into(tp.accumulate(in[0]), spectf::matmul_nt(g, tp.value(in[1])));
                  if (tp.requires_grad(in[1]))
                    add_into(tp.accumulate(in[1]), spectf::matmul_tn(tp.value(in[0]), g));
                });
}

Var matmul_nt(Var a, Var b) {
  same_tape(a, b);
  Tape& t = a.tape();
  return t.push(spectf::matmul_nt(a.value(), b.value()), {a.id(), b.id()},
                [](Tape& tp, std::size_t self) {
                  const auto& in = tp.inputs(self);
                  const Tensor& g = tp.adjoint(self);
                  if (tp.requires_grad(in[0]))
                    add_into(tp.accumulate(in[0]), spectf::matmul(g, tp.value(in[1])));
                  if (tp.requires_grad(in[1]))
                    add_into(tp.accumulate(in[1]), spectf::matmul_tn(g, tp.value(in[0])));
                });
}

Var add(Var a, Var b) {
  same_tape(a, b);
  if (a.value().shape() != b.value().shape()) {
    throw DimensionError("add: shapes " + shape_to_string(a.value().shape()) +
                         " and " + shape_to_string(b.value().shape()) + " differ");
  }
  Tensor out = a.value();
  add_into(out, b.value());
  return a.tape().push(std::move(out), {a.id(), b.id()},
                       [](Tape& tp, std::size_t self) {
                         for (std::size_t in : tp.inputs(self))
                           if (tp.requires_grad(in)) add_into(tp.accumulate(in), tp.adjoint(self));
                       });
}

Var scale(Var x, double factor) {
  Tensor out = x.value();
  for (double& v : out.data()) v *= factor;
  return x.tape().push(std::move(out), {x.id()},
                       [factor](Tape& tp, std::size_t self) {
                         Tensor& dst = tp.accumulate(tp.inputs(self)[0]);
                         auto g = tp.adjoint(self).data();
                         auto d = dst.data();
                         for (std::size_t i = 0; i < d.size(); ++i) d[i] += factor * g[i];
                       });
}

Var linear(Var x, Var w, Var bias) {
  same_tape(x, w);
  same_tape(x, bias);
  const Tensor& xv = x.value();
  const Tensor& wv = w.value();
  const Tensor& bv = bias.value();
  if (bv.size() != wv.cols()) {
    throw DimensionError("linear: bias " + shape_to_string(bv.shape()) +
                         " does not match weight " + shape_to_string(wv.shape()));
  }
  Tensor out = spectf::matmul(as_matrix(xv), wv);
  for (std::size_t i = 0; i < out.rows(); ++i) {
    auto r = out.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += bv[j];
  }
  return x.tape().push(std::move(out), {x.id(), w.id(), bias.id()},
                       [](Tape& tp, std::size_t self) {
                         const auto& in = tp.inputs(self);
                         const Tensor& g = tp.adjoint(self);
                         // dx is [rows x in]; a rank-1 input has the same element count.
                         if (tp.requires_grad(in[0]))
                           add_into(tp.accumulate(in[0]), spectf::matmul_nt(g, tp.value(in[1])));
                         if (tp.requires_grad(in[1])) {
                           add_into(tp.accumulate(in[1]),
                                    spectf::matmul_tn(as_matrix(tp.value(in[0])), g));
                         }
                         if (tp.requires_grad(in[2])) {
                           Tensor& db = tp.accumulate(in[2]);
                           for (std::size_t i = 0; i < g.rows(); ++i) {
                             auto r = g.row(i);
                             for (std::size_t j = 0; j < r.size(); ++j) db[j] += r[j];
                           }
                         }
                       });
}

Var tanh(Var x) {
  Tensor out = activate(x.value(), Activation::kTanh);
  return x.tape().push(std::move(out), {x.id()}, [](Tape& tp, std::size_t self) {
    auto y = tp.value(self).data();
    auto g = tp.adjoint(self).data();
    auto d = tp.accumulate(tp.inputs(self)[0]).data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i] * (1.0 - y[i] * y[i]);
  });
}

Var gelu(Var x) {
  Tensor out = activate(x.value(), Activation::kGelu);
  return x.tape().push(std::move(out), {x.id()}, [](Tape& tp, std::size_t self) {
    const std::size_t in = tp.inputs(self)[0];
    auto xv = tp.value(in).data();
    auto g = tp.adjoint(self).data();
    auto d = tp.accumulate(in).data();
    for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i] * gelu_derivative(xv[i]);
  });
}

Var softmax_rows(Var x) {
  const Tensor& xv = x.value();
  Tensor out = softmax(xv, xv.rank() - 1);
  return x.tape().push(std::move(out), {x.id()}, [](Tape& tp, std::size_t self) {
    const Tensor& y = tp.value(self);
    const Tensor& g = tp.adjoint(self);
    Tensor& d = tp.accumulate(tp.inputs(self)[0]);
    const std::size_t cols = y.cols();
    for (std::size_t i = 0; i < y.rows(); ++i) {
      const double* yr = y.data().data() + i * cols;
      const double* gr = g.data().data() + i * cols;
      double* dr = d.data().data() + i * cols;
      double dot = 0.0;
      for (std::size_t j = 0; j < cols; ++j) dot += yr[j] * gr[j];
      for (std::size_t j = 0; j < cols; ++j) dr[j] += yr[j] * (gr[j] - dot);
    }
  });
}

Var layer_norm(Var x, Var gain, Var bias, double eps) {
  same_tape(x, gain);
  same_tape(x, bias);
  const Tensor& xv = x.value();
  // Forward through the pure kernel for validation, then cache the
  // normalized activations and per-row inverse deviations for the adjoint.
  Tensor out = spectf::layer_norm(xv, gain.value(), bias.value(), eps);
  const std::size_t n = xv.rows(), d = xv.cols();
  Tensor normalized(xv.shape());
  std::vector<double> inv_std(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto r = xv.row(i);
    double mean = 0.0;
    for (double v : r) mean += v;
    mean /= static_cast<double>(d);
    double var = 0.0;
    for (double v : r) var += (v - mean) * (v - mean);
    var /= static_cast<double>(d);
    inv_std[i] = 1.0 / std::sqrt(var + eps);
    auto nr = normalized.row(i);
    for (std::size_t j = 0; j < d; ++j) nr[j] = (r[j] - mean) * inv_std[i];
  }
  return x.tape().push(
      std::move(out), {x.id(), gain.id(), bias.id()},
      [normalized = std::move(normalized), inv_std = std::move(inv_std)](Tape& tp,
                                                                        std::size_t self) {
        const auto& in = tp.inputs(self);
        const Tensor& g = tp.adjoint(self);
        const Tensor& gamma = tp.value(in[1]);
        const std::size_t n = g.rows(), d = g.cols();
        if (tp.requires_grad(in[1])) {
          Tensor& dg = tp.accumulate(in[1]);
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) dg[j] += g(i, j) * normalized(i, j);
        }
        if (tp.requires_grad(in[2])) {
          Tensor& db = tp.accumulate(in[2]);
          for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < d; ++j) db[j] += g(i, j);
        }
        if (tp.requires_grad(in[0])) {
          Tensor& dx = tp.accumulate(in[0]);
          const double inv_d = 1.0 / static_cast<double>(d);
          for (std::size_t i = 0; i < n; ++i) {
            double mean_gy = 0.0, mean_gy_xhat = 0.0;
            for (std::size_t j = 0; j < d; ++j) {
              const double gy = g(i, j) * gamma[j];
              mean_gy += gy;
              mean_gy_xhat += gy * normalized(i, j);
            }
            mean_gy *= inv_d;
            mean_gy_xhat *= inv_d;
            for (std::size_t j = 0; j < d; ++j) {
              const double gy = g(i, j) * gamma[j];
              dx.data()[i * d + j] +=
                  inv_std[i] * (gy - mean_gy - normalized(i, j) * mean_gy_xhat);
            }
          }
        }
      });
}

Var mask(Var x, Tensor keep_scale) {
  if (keep_scale.shape() != x.value().shape()) {
    throw DimensionError("mask: mask " + shape_to_string(keep_scale.shape()) +
                         " does not match " + shape_to_string(x.value().shape()));
  }
  Tensor out = x.value();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] *= keep_scale[i];
  return x.tape().push(std::move(out), {x.id()},
                       [m = std::move(keep_scale)](Tape& tp, std::size_t self) {
                         auto g = tp.adjoint(self).data();
                         auto d = tp.accumulate(tp.inputs(self)[0]).data();
                         for (std::size_t i = 0; i < d.size(); ++i) d[i] += g[i] * m[i];
                       });
}

Var max_rows(Var x) {
  const Tensor& xv = x.value();
  const std::size_t n = xv.rows(), d = xv.cols();
  Tensor out({1, d});
  std::vector<std::size_t> argmax(d, 0);
  for (std::size_t j = 0; j < d; ++j) {
    double best = xv.data()[j];
    for (std::size_t i = 1; i < n; ++i) {
      const double v = xv.data()[i * d + j];
      if (v > best) {
        best = v;
        argmax[j] = i;
      }
    }
    out[j] = best;
  }
  return x.tape().push(std::move(out), {x.id()},
                       [argmax = std::move(argmax)](Tape& tp, std::size_t self) {
                         const Tensor& g = tp.adjoint(self);
                         Tensor& dx = tp.accumulate(tp.inputs(self)[0]);
                         const std::size_t d = g.size();
                         for (std::size_t j = 0; j < d; ++j) dx[argmax[j] * d + j] += g[j];
                       });
}

Var concat_cols(std::span<const Var> parts) {
  if (parts.empty()) throw ContractError("concat_cols of nothing");
  const std::size_t n = parts.front().value().rows();
  std::size_t total = 0;
  std::vector<std::size_t> ids, widths;
  for (const Var& p : parts) {
    same_tape(parts.front(), p);
    if (p.value().rows() != n) {
      throw DimensionError("concat_cols: row counts differ, " +
                           shape_to_string(parts.front().value().shape()) + " vs " +
                           shape_to_string(p.value().shape()));
    }
    ids.push_back(p.id());
    widths.push_back(p.value().cols());
    total += p.value().cols();
  }
  Tensor out({n, total});
  std::size_t offset = 0;
  for (const Var& p : parts) {
    const Tensor& v = p.value();
    for (std::size_t i = 0; i < n; ++i)
      std::copy(v.row(i).begin(), v.row(i).end(), out.row(i).begin() + offset);
    offset += v.cols();
  }
  return parts.front().tape().push(
      std::move(out), std::move(ids), [widths = std::move(widths)](Tape& tp, std::size_t self) {
        const Tensor& g = tp.adjoint(self);
        const auto& in = tp.inputs(self);
        std::size_t offset = 0;
        for (std::size_t k = 0; k < in.size(); ++k) {
          if (tp.requires_grad(in[k])) {
            Tensor& d = tp.accumulate(in[k]);
            for (std::size_t i = 0; i < g.rows(); ++i) {
              auto src = g.row(i).subspan(offset, widths[k]);
              auto dst = d.data().subspan(i * widths[k], widths[k]);
              for (std::size_t j = 0; j < widths[k]; ++j) dst[j] += src[j];
            }
          }
          offset += widths[k];
        }
      });
}

namespace {

// Copies column block [offset, offset + width) of a row-major [n x stride]
// buffer into a contiguous [n x width] buffer, optionally transposed.
void gather_block(const double* src, std::size_t n, std::size_t stride, std::size_t offset,
                  std::size_t width, double* dst, bool transpose_out) {
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = src + i * stride + offset;
    for (std::size_t c = 0; c < width; ++c) {
      if (transpose_out) {
        dst[c * n + i] = row[c];
      } else {
        dst[i * width + c] = row[c];
      }
    }
  }
}

void scatter_add_block(const double* src, std::size_t n, std::size_t stride, std::size_t offset,
                       std::size_t width, double* dst) {
  for (std::size_t i = 0; i < n; ++i) {
    double* row = dst + i * stride + offset;
    for (std::size_t c = 0; c < width; ++c) row[c] += src[i * width + c];
  }
}

}  // namespace

Var multi_head_attention(Var q, Var k, Var v, std::size_t heads, double scale,
                         std::vector<Tensor> keep_scale, std::vector<Tensor>* weights_out,
                         std::vector<Tensor>* logits_out) {
  same_tape(q, k);
  same_tape(q, v);
  const Tensor& qv = q.value();
  const Tensor& kv = k.value();
  const Tensor& vv = v.value();
  if (qv.rank() != 2 || qv.shape() != kv.shape() || qv.shape() != vv.shape()) {
    throw DimensionError("multi_head_attention: q, k, v shapes " + shape_to_string(qv.shape()) +
                         ", " + shape_to_string(kv.shape()) + ", " + shape_to_string(vv.shape()) +
                         " must be equal matrices");
  }
  const std::size_t n = qv.rows(), width = qv.cols();
  if (heads == 0 || width % heads != 0) {
    throw DimensionError("multi_head_attention: width " + std::to_string(width) +
                         " is not divisible into " + std::to_string(heads) + " heads");
  }
  const std::size_t dh = width / heads;
  if (!keep_scale.empty()) {
    if (keep_scale.size() != heads) throw DimensionError("multi_head_attention: one mask per head");
    for (const Tensor& m : keep_scale) {
      if (m.shape() != Shape{n, n}) {
        throw DimensionError("multi_head_attention: mask " + shape_to_string(m.shape()) +
                             " does not match " + std::to_string(n) + "x" + std::to_string(n));
      }
    }
  }

  Tensor out({n, width});
  std::vector<Tensor> probs;
  probs.reserve(heads);
  std::vector<double> qh(n * dh), kt(dh * n), vh(n * dh), oh(n * dh);
  std::vector<double> mixed(keep_scale.empty() ? 0 : n * n);
  for (std::size_t h = 0; h < heads; ++h) {
    gather_block(qv.data().data(), n, width, h * dh, dh, qh.data(), false);
    gather_block(kv.data().data(), n, width, h * dh, dh, kt.data(), true);
    gather_block(vv.data().data(), n, width, h * dh, dh, vh.data(), false);
    Tensor logits({n, n});
    gemm_accumulate(qh.data(), kt.data(), logits.data().data(), n, dh, n);
    for (double& x : logits.data()) x *= scale;
    Tensor p = spectf::softmax(logits, 1);
    if (logits_out) logits_out->push_back(std::move(logits));
    if (weights_out) weights_out->push_back(p);
    const double* a = p.data().data();
    if (!keep_scale.empty()) {
      const double* m = keep_scale[h].data().data();
      for (std::size_t i = 0; i < n * n; ++i) mixed[i] = a[i] * m[i];
      a = mixed.data();
    }
    std::fill(oh.begin(), oh.end(), 0.0);
    gemm_accumulate(a, vh.data(), oh.data(), n, n, dh);
    for (std::size_t i = 0; i < n; ++i) {
      std::copy_n(oh.data() + i * dh, dh, out.data().data() + i * width + h * dh);
    }
    probs.push_back(std::move(p));
  }

  return q.tape().push(
      std::move(out), {q.id(), k.id(), v.id()},
      [probs = std::move(probs), masks = std::move(keep_scale), heads, dh, scale](
          Tape& tp, std::size_t self) {
        const auto& in = tp.inputs(self);
        const Tensor& g = tp.adjoint(self);
        const std::size_t n = g.rows(), width = g.cols();
        const double* qd = tp.value(in[0]).data().data();
        const double* kd = tp.value(in[1]).data().data();
        const double* vd = tp.value(in[2]).data().data();
        std::vector<double> qh(n * dh), kh(n * dh), vt(dh * n), go(n * dh);
        std::vector<double> dq(n * dh), dk(n * dh), dv(n * dh);
        std::vector<double> mixed(masks.empty() ? 0 : n * n), ds(n * n);
        for (std::size_t h = 0; h < heads; ++h) {
          gather_block(qd, n, width, h * dh, dh, qh.data(), false);
          gather_block(kd, n, width, h * dh, dh, kh.data(), false);
          gather_block(vd, n, width, h * dh, dh, vt.data(), true);
          gather_block(g.data().data(), n, width, h * dh, dh, go.data(), false);
          const double* p = probs[h].data().data();
          const double* m = masks.empty() ? nullptr : masks[h].data().data();
          const double* a = p;
          if (m) {
            for (std::size_t i = 0; i < n * n; ++i) mixed[i] = p[i] * m[i];
            a = mixed.data();
          }
          // dV = A^T dO
          std::fill(dv.begin(), dv.end(), 0.0);
          gemm_tn_accumulate(a, go.data(), dv.data(), n, n, dh);
          // dA = dO V^T, then through the mask and the row softmax.
          std::fill(ds.begin(), ds.end(), 0.0);
          gemm_accumulate(go.data(), vt.data(), ds.data(), n, dh, n);
          for (std::size_t i = 0; i < n; ++i) {
            double* row = ds.data() + i * n;
            const double* prow = p + i * n;
            if (m) {
              const double* mrow = m + i * n;
              for (std::size_t j = 0; j < n; ++j) row[j] *= mrow[j];
            }
            double dot = 0.0;
            for (std::size_t j = 0; j < n; ++j) dot += prow[j] * row[j];
            for (std::size_t j = 0; j < n; ++j) row[j] = prow[j] * (row[j] - dot) * scale;
          }
          // dQ = dS K, dK = dS^T Q
          std::fill(dq.begin(), dq.end(), 0.0);
          gemm_accumulate(ds.data(), kh.data(), dq.data(), n, n, dh);
          std::fill(dk.begin(), dk.end(), 0.0);
          gemm_tn_accumulate(ds.data(), qh.data(), dk.data(), n, n, dh);
          if (tp.requires_grad(in[0]))
            scatter_add_block(dq.data(), n, width, h * dh, dh, tp.accumulate(in[0]).data().data());
          if (tp.requires_grad(in[1]))
            scatter_add_block(dk.data(), n, width, h * dh, dh, tp.accumulate(in[1]).data().data());
          if (tp.requires_grad(in[2]))
            scatter_add_block(dv.data(), n, width, h * dh, dh, tp.accumulate(in[2]).data().data());
        }
      });
}

Var sum(Var x) {
  double total = 0.0;
  for (double v : x.value().data()) total += v;
  return x.tape().push(Tensor({1}, {total}), {x.id()}, [](Tape& tp, std::size_t self) {
    const double g = tp.adjoint(self)[0];
    for (double& d : tp.accumulate(tp.inputs(self)[0]).data()) d += g;
  });
}

Var mean_nll(Var probs, std::span<const int> labels) {
  const Tensor& p = probs.value();
  if (labels.size() != p.rows()) {
    throw DimensionError("mean_nll: " + std::to_string(labels.size()) +
                         " labels for probabilities " + shape_to_string(p.shape()));
  }
  std::vector<int> label_copy(labels.begin(), labels.end());
  double total = 0.0;
  for (std::size_t i = 0; i < p.rows(); ++i) {
    const auto l = static_cast<std::size_t>(label_copy[i]);
    if (label_copy[i] < 0 || l >= p.cols()) throw ContractError("mean_nll: label out of range");
    total -= std::log(std::max(p(i, l), kProbabilityFloor));
  }
  const double count = static_cast<double>(p.rows());
  return probs.tape().push(
      Tensor({1}, {total / count}), {probs.id()},
      [label_copy = std::move(label_copy), count](Tape& tp, std::size_t self) {
        const std::size_t in = tp.inputs(self)[0];
        const Tensor& pv = tp.value(in);
        const double g = tp.adjoint(self)[0];
        Tensor& d = tp.accumulate(in);
        for (std::size_t i = 0; i < pv.rows(); ++i) {
          const auto l = static_cast<std::size_t>(label_copy[i]);
          const double pl = pv(i, l);
          // Clamped probabilities contribute a constant, hence no gradient.
          if (pl > kProbabilityFloor) d(i, l) -= g / (count * pl);
        }
      });
}

}  // namespace ag
}  // namespace spectf
