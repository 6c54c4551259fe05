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

#include "spectf/parameters.hpp"

#include <cmath>

#include "spectf/error.hpp"
#include "spectf/rng.hpp"

namespace spectf {

std::size_t ParameterSet::add(std::string name, Tensor value) {
  names_.push_back(std::move(name));
  tensors_.push_back(std::move(value));
  return tensors_.size() - 1;
}

std::size_t ParameterSet::scalar_count() const {
  std::size_t n = 0;
  for (const auto& t : tensors_) n += t.size();
  return n;
}

std::size_t ParameterSet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names_.size(); ++i) {
    if (names_[i] == name) return i;
  }
  throw ContractError("no parameter named '" + std::string(name) + "'");
}

std::vector<Var> ParameterSet::bind(Tape& tape) const {
  std::vector<Var> vars;
  vars.reserve(tensors_.size());
  for (const auto& t : tensors_) vars.push_back(tape.parameter(t));
  return vars;
}

std::vector<Tensor> ParameterSet::zeros_like() const {
  std::vector<Tensor> out;
  out.reserve(tensors_.size());
  for (const auto& t : tensors_) out.emplace_back(t.shape());
  return out;
}

Tensor uniform_fan_in(std::size_t fan_in, std::size_t fan_out, Rng& rng) {
  const double bound = std::sqrt(1.0 / static_cast<double>(fan_in));
  Tensor w({fan_in, fan_out});
  for (double& v : w.data()) v = rng.uniform(-bound, bound);
  return w;
}

Tensor dropout_mask(const Shape& shape, double rate, Rng& rng) {
  Tensor m(shape, 1.0);
  if (rate <= 0.0) return m;
  if (rate >= 1.0) throw ContractError("dropout rate must be < 1");
  // Each 64-bit draw decides four entries through 16-bit lanes, so the
  // realized rate is rate rounded to a multiple of 2^-16.
  const auto cut = static_cast<std::uint64_t>(std::llround(rate * 65536.0));
  const double keep = 1.0 / (1.0 - rate);
  auto d = m.data();
  std::uint64_t bits = 0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (i % 4 == 0) bits = rng.next();
    d[i] = (bits & 0xffff) < cut ? 0.0 : keep;
    bits >>= 16;
  }
  return m;
}

}  // namespace spectf
