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

#ifndef SPECTF_ERROR_HPP_
#define SPECTF_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace spectf {

// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Tensor extents do not fit the operation.
class DimensionError : public Error {
 public:
  using Error::Error;
};

// A caller broke a documented precondition.
class ContractError : public Error {
 public:
  using Error::Error;
};

// Solar zenith at or beyond the horizon; no reflectance can be formed.
class NightSceneError : public ContractError {
 public:
  using ContractError::ContractError;
};

// Invalid model / training / generator configuration.
class ConfigError : public ContractError {
 public:
  using ContractError::ContractError;
};

// NaN or infinity where finite numbers are required.
class NumericError : public Error {
 public:
  using Error::Error;
};

// A metric is mathematically undefined for the given input
// (single-class ROC, F-beta with no positives at all, ...).
class UndefinedMetricError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent file content.
class FormatError : public Error {
 public:
  using Error::Error;
};

class ChecksumError : public FormatError {
 public:
  using FormatError::FormatError;
};

class VersionError : public FormatError {
 public:
  using FormatError::FormatError;
};

}  // namespace spectf

#endif  // SPECTF_ERROR_HPP_
