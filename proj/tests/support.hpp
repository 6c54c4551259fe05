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

#ifndef SPECTF_TESTS_SUPPORT_HPP_
#define SPECTF_TESTS_SUPPORT_HPP_

// Helpers shared by the unit tests: random inputs and scratch directories.

#include <unistd.h>

#include <atomic>
#include <filesystem>
#include <string>
#include <vector>

#include "spectf/rng.hpp"
#include "spectf/spectra.hpp"
#include "spectf/tensor.hpp"

namespace spectf::testing {

inline Tensor random_tensor(const Shape& shape, Rng& rng, double scale = 1.0) {
  Tensor t(shape);
  for (double& v : t.data()) v = scale * rng.normal();
  return t;
}

inline std::vector<double> random_reflectance(std::size_t n, Rng& rng) {
  std::vector<double> v(n);
  for (double& x : v) x = rng.uniform(0.0, 1.0);
  return v;
}

// n strictly increasing band centers spread over [400, 2400] nm.
inline std::vector<double> random_wavelengths(std::size_t n, Rng& rng) {
  std::vector<double> w(n);
  double at = 400.0;
  const double step = 2000.0 / static_cast<double>(n);
  for (double& x : w) {
    x = at + rng.uniform(0.05, 0.95) * step;
    at += step;
  }
  return w;
}

// A fresh directory under the system temp dir, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("spectf_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& name) const { return path_ / name; }

 private:
  std::filesystem::path path_;
};

}  // namespace spectf::testing

#endif  // SPECTF_TESTS_SUPPORT_HPP_
