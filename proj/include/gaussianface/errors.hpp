// Copyright 2026 The GaussianFace Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace gf {

/// Thrown when a caller breaks a documented precondition (dimension mismatch,
/// single-class labels, out-of-range counts).
class ContractViolation : public std::invalid_argument {
 public:
  explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when a factorization fails or a computation produces NaN/Inf.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative solver gave up; carries the last gradient norm it saw.
class OptimizationFailure : public NumericalError {
 public:
  OptimizationFailure(const std::string& what, double last_gradient_norm)
      : NumericalError(what), last_gradient_norm_(last_gradient_norm) {}
  [[nodiscard]] double last_gradient_norm() const noexcept { return last_gradient_norm_; }

 private:
  double last_gradient_norm_;
};

/// Malformed configuration or input file.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

void require(bool condition, const std::string& message);

/// Writes a warning line to stderr unless warnings are silenced.
void warn(const std::string& message);
void set_warnings_enabled(bool enabled);

}  // namespace gf
