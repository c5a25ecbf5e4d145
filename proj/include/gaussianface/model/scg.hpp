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

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace gf {

/// Objective callable: returns f(x) and, when grad is non-null, writes the gradient.
using ScgObjective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct ScgOptions {
  int max_iterations = 200;
  /// Stop once an accepted step changes f by at most f_tolerance * |f|.
  double f_tolerance = 1e-6;
  /// Stop once the gradient infinity norm falls to this level.
  double gradient_tolerance = 1e-12;
  /// Consecutive rejected trial points (including non-finite ones) before giving up.
  int max_rejections = 50;
};

struct ScgResult {
  Eigen::VectorXd x;  ///< best point seen
  double f = 0.0;
  std::vector<double> trace;  ///< f after every iteration, starting with f(x0)
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
};

/// Scaled conjugate gradients (Moller 1993, in the form used by netlab).
/// Accepted steps never increase f, so the trace is non-increasing.
/// Throws NumericalError if f(x0) or its gradient is not finite and
/// OptimizationFailure after max_rejections consecutive rejected steps.
[[nodiscard]] ScgResult scg_minimize(const ScgObjective& objective, const Eigen::VectorXd& x0,
                                     const ScgOptions& opts = {});

}  // namespace gf
