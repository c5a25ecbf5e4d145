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

#include "gaussianface/core/kernel_operator.hpp"

namespace gf {

/// Class structure behind the regularized KFDA criterion. Positives are
/// placed before negatives through `order`; `a` and A() use that block layout:
///   a = [1/N+ 1_{N+}, -1/N- 1_{N-}]
///   A = diag((I - 11^T/N+)/sqrt(N+), (I - 11^T/N-)/sqrt(N-))
struct KfdaStructure {
  int n_pos = 0;
  int n_neg = 0;
  std::vector<int> order;  ///< order[k] = original index at block position k
  Eigen::VectorXd a;       ///< block order
  double lambda = 1e-8;

  [[nodiscard]] int size() const noexcept { return n_pos + n_neg; }
  /// Dense A in block order.
  [[nodiscard]] Eigen::MatrixXd A() const;
  /// A x for x in block order, O(N).
  [[nodiscard]] Eigen::MatrixXd apply_A(const Eigen::MatrixXd& x) const;
  /// `a` scattered back to the caller's original ordering.
  [[nodiscard]] Eigen::VectorXd a_original() const;
};

/// Throws ContractViolation when either class is empty or lambda <= 0.
[[nodiscard]] KfdaStructure build_kfda(const Eigen::VectorXd& labels, double lambda);

/// J* and the vector r = a - A (lambda I + A K A)^{-1} A K a (original order).
/// dJ* = (1/lambda) r^T dK r, so r is all the gradient code needs.
struct KfdaValue {
  double value = 0.0;
  Eigen::VectorXd residual;
};

/// J* = (1/lambda)(a^T K a - a^T K A (lambda I + A K A)^{-1} A K a).
/// The low-rank operator path inverts lambda I + A K~ A by Woodbury.
[[nodiscard]] KfdaValue kfda_evaluate(const KernelOperator& K, const KfdaStructure& s);
[[nodiscard]] KfdaValue kfda_evaluate(const Eigen::MatrixXd& K, const KfdaStructure& s);

[[nodiscard]] double kfda_objective(const Eigen::MatrixXd& K, const KfdaStructure& s);

/// dJ*/dtheta_j for an elementwise kernel derivative dK (original order).
[[nodiscard]] double kfda_grad_theta(const Eigen::MatrixXd& K, const Eigen::MatrixXd& dK, const KfdaStructure& s);

/// Four-term expression (a'dKa - a'dK A~ a + a'K A~ dK A~ K a - a'K A~ dK a)/lambda
/// with A~ = A (lambda I + A K A)^{-1} A. It is not the derivative of J*
/// (it misses the dM term); kept only so tests can show the mismatch.
[[nodiscard]] double kfda_grad_theta_printed(const Eigen::MatrixXd& K, const Eigen::MatrixXd& dK,
                                             const KfdaStructure& s);

enum class PriorForm {
  kNegativeFisher,  ///< log p(Z) = -J*/sigma^2
  kInverseFisher,   ///< log p(Z) = -1/(sigma^2 J*)
};

struct PriorConfig {
  double sigma = 1.0;
  double lambda = 1e-8;
  PriorForm form = PriorForm::kNegativeFisher;
};

/// Unnormalized discriminative log prior over latents, from J*.
[[nodiscard]] double prior_log_density(const Eigen::MatrixXd& K, const KfdaStructure& s, const PriorConfig& cfg);
[[nodiscard]] double prior_log_density(double j_star, const PriorConfig& cfg);
/// d(log prior)/dJ*.
[[nodiscard]] double prior_log_density_slope(double j_star, const PriorConfig& cfg);

}  // namespace gf
