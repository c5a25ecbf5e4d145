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

#include <vector>

#include <Eigen/Dense>

namespace gf {

struct LaplaceOptions {
  double gradient_tolerance = 1e-8;
  int max_iterations = 100;
  int max_halvings = 20;
};

/// Laplace approximation of the GP classification posterior under the
/// probit likelihood Phi(y f).
struct LaplaceResult {
  Eigen::VectorXd f_hat;
  Eigen::VectorXd W;         ///< -d^2 log p(y|f)/df^2 at the mode, all >= 0
  Eigen::VectorXd grad_lik;  ///< d log p(y|f)/df at the mode, equals K^{-1} f_hat
  Eigen::VectorXd alpha;     ///< Newton iterate with f_hat = K alpha
  double log_marginal = 0.0;
  double stationarity = 0.0;  ///< ||grad_lik - K^{-1} f_hat||_inf
  int iterations = 0;
  /// Cholesky of B = I + W^{1/2} K W^{1/2}; the prediction cache.
  Eigen::LLT<Eigen::MatrixXd> B_llt;
};

/// Damped Newton search for the posterior mode. Throws OptimizationFailure
/// (carrying the last gradient norm) if the tolerance is not reached.
[[nodiscard]] LaplaceResult laplace_mode(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                                         const LaplaceOptions& opts = {});

/// Rebuilds a mode result from a stored Newton iterate alpha (f = K alpha),
/// repeating the exact arithmetic of laplace_mode so results match bitwise.
[[nodiscard]] LaplaceResult laplace_from_alpha(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                                               const Eigen::VectorXd& alpha, int iterations);

/// -1/2 f^T K^{-1} f + log p(y|f) - 1/2 log|I + W^{1/2} K W^{1/2}| at the mode.
[[nodiscard]] double log_marginal_laplace(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                                          const LaplaceOptions& opts = {});

/// Gradient of log_marginal_laplace with respect to parameters whose kernel
/// derivatives are dK[j], including the implicit dependence of the mode.
[[nodiscard]] Eigen::VectorXd log_marginal_laplace_gradient(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                                                            const std::vector<Eigen::MatrixXd>& dK,
                                                            const LaplaceOptions& opts = {});

/// Checks labels are exactly +-1 and non-empty.
void validate_labels(const Eigen::VectorXd& y);

}  // namespace gf
