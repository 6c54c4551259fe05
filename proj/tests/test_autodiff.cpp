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

#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "doctest.h"
#include "spectf/autodiff.hpp"
#include "spectf/error.hpp"
#include "spectf/gradcheck.hpp"
#include "spectf/parameters.hpp"
#include "spectf/rng.hpp"
#include "spectf/spectf_model.hpp"
#include "support.hpp"

using namespace spectf;
using spectf::testing::random_tensor;

namespace {

using OpBuilder = std::function<Var(Tape&, std::span<const Var>)>;

// Reduces an arbitrary op output to a scalar through a fixed random
// projection, so every output entry contributes to the checked gradient.
Var project(Var out, const Tensor& weights) { return ag::sum(ag::mask(out, weights)); }

// Finite-difference check of `op` at `points` random inputs of the given
// shapes. Returns the worst relative error seen.
double check_op(const OpBuilder& op, const std::vector<Shape>& shapes, std::uint64_t seed,
                int points = 10, double input_scale = 1.0) {
  Rng rng(seed);
  double worst = 0.0;
  for (int p = 0; p < points; ++p) {
    std::vector<Tensor> inputs;
    for (const Shape& s : shapes) inputs.push_back(random_tensor(s, rng, input_scale));
    Tensor weights;
    {
      Tape probe(false);
      std::vector<Var> vars;
      for (const Tensor& t : inputs) vars.push_back(probe.parameter(t));
      weights = random_tensor(op(probe, vars).value().shape(), rng);
    }
    auto loss = [&] {
      Tape tape(false);
      std::vector<Var> vars;
      for (const Tensor& t : inputs) vars.push_back(tape.parameter(t));
      return project(op(tape, vars), weights).value()[0];
    };
    Tape tape;
    std::vector<Var> vars;
    for (const Tensor& t : inputs) vars.push_back(tape.parameter(t));
    tape.backward(project(op(tape, vars), weights));
    std::vector<Tensor> analytic;
    for (const Var& v : vars) analytic.push_back(tape.gradient(v));
    std::vector<Tensor*> params;
    for (Tensor& t : inputs) params.push_back(&t);
    worst = std::max(worst, finite_difference_check(loss, params, analytic).max_relative_error);
  }
  return worst;
}

}  // namespace

TEST_CASE("gradient of sum(A x) with respect to x is A^T 1") {
  const Tensor a = Tensor::matrix({{1, 2, 3}, {4, 5, 6}});
  const Tensor x = Tensor::matrix({{0.5}, {-1}, {2}});
  Tape tape;
  Var av = tape.parameter(a);
  Var xv = tape.parameter(x);
  tape.backward(ag::sum(ag::matmul(av, xv)));
  CHECK(tape.gradient(xv) == Tensor::matrix({{5}, {7}, {9}}));
}

TEST_CASE("parameter not on the loss path gets an exactly zero gradient") {
  const Tensor a = Tensor::matrix({{1, 2}});
  const Tensor unused = Tensor::matrix({{3, 4}, {5, 6}});
  Tape tape;
  Var av = tape.parameter(a);
  Var uv = tape.parameter(unused);
  (void)ag::tanh(uv);
  tape.backward(ag::sum(ag::scale(av, 2.0)));
  const Tensor g = tape.gradient(uv);
  CHECK(g.shape() == unused.shape());
  for (double v : g.data()) CHECK(v == 0.0);
}

TEST_CASE("backward rejects a non-scalar loss and a non-recording tape") {
  const Tensor a = Tensor::matrix({{1, 2}});
  Tape tape;
  Var av = tape.parameter(a);
  CHECK_THROWS_AS(tape.backward(ag::scale(av, 1.0)), ContractError);
  Tape inference(false);
  Var bv = inference.parameter(a);
  CHECK_THROWS_AS(inference.backward(ag::sum(bv)), ContractError);
}

TEST_CASE("adjoint replay visits ops in exact reverse order") {
  const Tensor a = Tensor::matrix({{0.1, 0.2}, {0.3, 0.4}});
  Tape tape;
  Var x = tape.parameter(a);
  Var y = ag::tanh(x);
  Var z = ag::gelu(y);
  Var w = ag::add(z, y);
  Var loss = ag::sum(w);
  tape.backward(loss);
  // Leaves have no adjoint closure and are not part of the trace.
  const std::vector<std::size_t> expected{loss.id(), w.id(), z.id(), y.id()};
  CHECK(tape.backward_trace() == expected);
}

TEST_CASE("two backward passes produce bitwise-identical gradients") {
  Rng rng(5);
  SpecTfConfig cfg;
  cfg.d_model = 8;
  cfg.heads = 2;
  const SpecTfModel model = SpecTfModel::build(cfg, 3);
  const auto refl = spectf::testing::random_reflectance(12, rng);
  const auto wl = spectf::testing::random_wavelengths(12, rng);
  std::vector<std::vector<Tensor>> runs;
  for (int r = 0; r < 2; ++r) {
    Tape tape;
    const auto params = model.parameters().bind(tape);
    Rng drop(99);
    auto out = model.forward(tape, params, refl, wl, Mode::kTrain, &drop);
    const int label = 1;
    tape.backward(ag::mean_nll(out.probabilities, std::span<const int>(&label, 1)));
    std::vector<Tensor> g;
    for (const Var& p : params) g.push_back(tape.gradient(p));
    runs.push_back(std::move(g));
  }
  CHECK(runs[0] == runs[1]);
}

TEST_CASE("finite_difference_check on closed forms") {
  SUBCASE("theta squared at 3") {
    Tensor theta = Tensor::vector({3.0});
    auto f = [&] { return theta[0] * theta[0]; };
    Tensor* params[] = {&theta};
    const Tensor analytic[] = {Tensor::vector({6.0})};
    const auto r = finite_difference_check(f, params, analytic);
    CHECK(r.max_relative_error < 1e-9);
    CHECK(r.worst_numeric == doctest::Approx(6.0).epsilon(1e-9));
    CHECK(theta[0] == 3.0);
  }
  SUBCASE("constant function") {
    Tensor theta = Tensor::vector({1.0, -2.0});
    auto f = [] { return 4.0; };
    Tensor* params[] = {&theta};
    const Tensor analytic[] = {Tensor::vector({0.0, 0.0})};
    const auto r = finite_difference_check(f, params, analytic);
    CHECK(r.max_relative_error == 0.0);
  }
}

TEST_CASE("every differentiable op matches central differences") {
  constexpr double kTol = 1e-4;
  CHECK(check_op([](Tape&, std::span<const Var> v) { return ag::matmul(v[0], v[1]); },
                 {{3, 4}, {4, 2}}, 1) < kTol);
  CHECK(check_op([](Tape&, std::span<const Var> v) { return ag::matmul_nt(v[0], v[1]); },
                 {{3, 4}, {5, 4}}, 2) < kTol);
  CHECK(check_op([](Tape&, std::span<const Var> v) { return ag::add(v[0], v[1]); },
                 {{2, 3}, {2, 3}}, 3) < kTol);
  CHECK(check_op([](Tape&, std::span<const Var> v) { return ag::scale(v[0], -1.7); }, {{2, 3}},
                 4) < kTol);
  CHECK(check_op([](Tape&, std::span<const Var> v) { return ag::linear(v[0], v[1], v[2]); },
                 {{4, 3}, {3, 5}, {5}}, 5) < kTol);
  CHECK(check_op([](Tape&, std::span<const Var> v) { return ag::tanh(v[0]); }, {{3, 3}}, 6) <
        kTol);
  CHECK(check_op([](Tape&, std::span<const Var> v) { return ag::gelu(v[0]); }, {{3, 3}}, 7,
                 10, 2.0) < kTol);
  CHECK(check_op([](Tape&, std::span<const Var> v) { return ag::softmax_rows(v[0]); },
                 {{3, 5}}, 8) < kTol);
  CHECK(check_op([](Tape&, std::span<const Var> v) { return ag::layer_norm(v[0], v[1], v[2]); },
                 {{4, 6}, {6}, {6}}, 9) < kTol);
  CHECK(check_op([](Tape&, std::span<const Var> v) { return ag::max_rows(v[0]); }, {{5, 4}},
                 10) < kTol);
  CHECK(check_op(
            [](Tape&, std::span<const Var> v) {
              const Var parts[] = {v[0], v[1]};
              return ag::concat_cols(parts);
            },
            {{3, 2}, {3, 4}}, 11) < kTol);
  CHECK(check_op(
            [](Tape&, std::span<const Var> v) {
              Tensor keep = Tensor::matrix({{2, 0, 2}, {2, 2, 0}});
              return ag::mask(v[0], keep);
            },
            {{2, 3}}, 12) < kTol);
}

TEST_CASE("mean_nll gradient matches central differences") {
  const int labels[] = {1, 0, 1};
  const double worst = check_op(
      [&](Tape&, std::span<const Var> v) {
        return ag::mean_nll(ag::softmax_rows(v[0]), labels);
      },
      {{3, 2}}, 13);
  CHECK(worst < 1e-4);
  Tape tape;
  const Tensor p = Tensor::matrix({{0.25, 0.75}});
  Var pv = tape.parameter(p);
  const int one[] = {1};
  CHECK(ag::mean_nll(pv, one).value()[0] == doctest::Approx(-std::log(0.75)).epsilon(1e-14));
}

TEST_CASE("multi-head attention gradient with and without dropout masks") {
  constexpr std::size_t n = 5, heads = 2, width = 6;
  const double scale = 1.0 / std::sqrt(3.0);
  CHECK(check_op(
            [&](Tape&, std::span<const Var> v) {
              return ag::multi_head_attention(v[0], v[1], v[2], heads, scale);
            },
            {{n, width}, {n, width}, {n, width}}, 14) < 1e-4);
  Rng rng(15);
  std::vector<Tensor> masks;
  for (std::size_t h = 0; h < heads; ++h) masks.push_back(dropout_mask({n, n}, 0.3, rng));
  CHECK(check_op(
            [&](Tape&, std::span<const Var> v) {
              return ag::multi_head_attention(v[0], v[1], v[2], heads, scale, masks);
            },
            {{n, width}, {n, width}, {n, width}}, 16) < 1e-4);
}

TEST_CASE("multi-head attention equals per-head softmax(q k^T s) v") {
  Rng rng(17);
  constexpr std::size_t n = 4, heads = 2, dh = 3;
  const Tensor q = random_tensor({n, heads * dh}, rng);
  const Tensor k = random_tensor({n, heads * dh}, rng);
  const Tensor v = random_tensor({n, heads * dh}, rng);
  Tape tape(false);
  std::vector<Tensor> weights;
  const Tensor out = ag::multi_head_attention(tape.parameter(q), tape.parameter(k),
                                              tape.parameter(v), heads, 0.5, {}, &weights)
                         .value();
  REQUIRE(weights.size() == heads);
  for (std::size_t h = 0; h < heads; ++h) {
    Tensor logits({n, n});
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double s = 0.0;
        for (std::size_t c = 0; c < dh; ++c) s += q(i, h * dh + c) * k(j, h * dh + c);
        logits(i, j) = 0.5 * s;
      }
    const Tensor p = softmax(logits, 1);
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        CHECK(weights[h](i, j) == doctest::Approx(p(i, j)).epsilon(1e-13));
        row += weights[h](i, j);
      }
      CHECK(std::fabs(row - 1.0) < 1e-12);
      for (std::size_t c = 0; c < dh; ++c) {
        double s = 0.0;
        for (std::size_t j = 0; j < n; ++j) s += p(i, j) * v(j, h * dh + c);
        CHECK(out(i, h * dh + c) == doctest::Approx(s).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("full SpecTf loss gradient at random init matches central differences") {
  Rng rng(21);
  SpecTfConfig cfg;
  cfg.d_model = 8;
  cfg.heads = 2;
  SpecTfModel model = SpecTfModel::build(cfg, 7);
  // Non-trivial biases and gains so every parameter is exercised away from
  // its initial symmetric value.
  for (Tensor& t : model.parameters().tensors())
    for (double& x : t.data()) x += 0.1 * rng.normal();
  const auto refl = spectf::testing::random_reflectance(12, rng);
  const auto wl = spectf::testing::random_wavelengths(12, rng);
  const int label = 1;
  auto loss_on = [&](Tape& tape, std::span<const Var> params) {
    auto out = model.forward(tape, params, refl, wl, Mode::kInfer, nullptr);
    return ag::mean_nll(out.probabilities, std::span<const int>(&label, 1));
  };
  Tape tape;
  const auto params = model.parameters().bind(tape);
  tape.backward(loss_on(tape, params));
  std::vector<Tensor> analytic;
  for (const Var& p : params) analytic.push_back(tape.gradient(p));
  auto loss = [&] {
    Tape t(false);
    const auto ps = model.parameters().bind(t);
    return loss_on(t, ps).value()[0];
  };
  // A key bias shifts every logit of a query row by the same amount, which
  // softmax ignores, so its gradient is identically zero. The relative error
  // is meaningless there; those tensors are checked for an absolute zero.
  std::vector<Tensor*> ptrs;
  std::vector<Tensor> checked;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const std::string& name = model.parameters().name(i);
    if (name.ends_with(".k.bias")) {
      for (double g : analytic[i].data()) CHECK(std::fabs(g) < 1e-12);
      continue;
    }
    ptrs.push_back(&model.parameters()[i]);
    checked.push_back(analytic[i]);
    names.push_back(name);
  }
  const auto r = finite_difference_check(loss, ptrs, checked);
  INFO("worst tensor ", names[r.worst_tensor], " index ", r.worst_index);
  CHECK(r.max_relative_error < 1e-4);
}
