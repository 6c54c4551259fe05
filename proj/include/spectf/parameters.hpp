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

#ifndef SPECTF_PARAMETERS_HPP_
#define SPECTF_PARAMETERS_HPP_

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "spectf/autodiff.hpp"
#include "spectf/tensor.hpp"

namespace spectf {

class Rng;

// Ordered, named parameter tensors of one model. The order is the on-disk
// order and the optimizer order.
class ParameterSet {
 public:
  // Returns the index of the new entry.
  std::size_t add(std::string name, Tensor value);

  std::size_t size() const { return tensors_.size(); }
  std::size_t scalar_count() const;
  const std::string& name(std::size_t i) const { return names_[i]; }
  Tensor& operator[](std::size_t i) { return tensors_[i]; }
  const Tensor& operator[](std::size_t i) const { return tensors_[i]; }
  std::vector<Tensor>& tensors() { return tensors_; }
  const std::vector<Tensor>& tensors() const { return tensors_; }
  // Throws ContractError for an unknown name.
  std::size_t index_of(std::string_view name) const;

  // Leaf Vars on `tape` borrowing every tensor, in order.
  std::vector<Var> bind(Tape& tape) const;
  // Zero tensors shaped like the parameters.
  std::vector<Tensor> zeros_like() const;

  friend bool operator==(const ParameterSet&, const ParameterSet&) = default;

 private:
  std::vector<std::string> names_;
  std::vector<Tensor> tensors_;
};

// Uniform(-sqrt(1/fan_in), +sqrt(1/fan_in)) weights.
Tensor uniform_fan_in(std::size_t fan_in, std::size_t fan_out, Rng& rng);

// Bias/gain helpers.
inline Tensor zeros(std::size_t n) { return Tensor({n}, 0.0); }
inline Tensor ones(std::size_t n) { return Tensor({n}, 1.0); }

// Inverted-dropout keep mask: each entry is 0 with probability `rate`,
// otherwise 1 / (1 - rate).
Tensor dropout_mask(const Shape& shape, double rate, Rng& rng);

}  // namespace spectf

#endif  // SPECTF_PARAMETERS_HPP_
