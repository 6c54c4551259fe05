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

#ifndef SPECTF_RNG_HPP_
#define SPECTF_RNG_HPP_

// Portable seeded randomness.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. The standard <random> distributions are implementation-defined,
// so the conversions to doubles, bounded integers and normals are done here:
//   uniform()      = (x >> 11) * 2^-53                 in [0, 1)
//   below(n)       = rejection sampling on the top bits ("bitmask" method)
//   normal()       = Box-Muller on two uniform() draws, cosine branch only
// Streams are derived as mix64(base_seed ^ fnv1a64(key)) with mix64 the
// SplitMix64 finalizer, so every scene / epoch / sample gets an independent
// reproducible stream.

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace spectf {

std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t mix64(std::uint64_t x);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(mix64(seed)) {}

  // Independent stream keyed by a string (e.g. a scene id).
  static Rng stream(std::uint64_t base_seed, std::string_view key) {
    return Rng(base_seed ^ fnv1a64(key));
  }
  // Independent stream keyed by integers (e.g. epoch, sample index).
  static Rng stream(std::uint64_t base_seed, std::uint64_t a, std::uint64_t b = 0) {
    return Rng(mix64(base_seed ^ mix64(a + 0x9e3779b97f4a7c15ULL)) ^ mix64(b));
  }

  std::uint64_t next() { return engine_(); }
  double uniform();
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer in [0, n); n > 0.
  std::uint64_t below(std::uint64_t n);
  double normal();
  bool bernoulli(double p) { return uniform() < p; }

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace spectf

#endif  // SPECTF_RNG_HPP_
