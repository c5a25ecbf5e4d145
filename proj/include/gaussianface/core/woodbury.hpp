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

#include <Eigen/Dense>

namespace gf {

/// Applies (B + U U^T)^{-1} through the q x q core I + U^T B^{-1} U:
///   (B + U U^T)^{-1} = B^{-1} - B^{-1} U (I + U^T B^{-1} U)^{-1} U^T B^{-1}.
/// Setup is O(n q^2 + q^3); each applied column costs O(n q) plus one base solve.
class LowRankInverse {
 public:
  using BaseInverse = std::function<Eigen::MatrixXd(const Eigen::MatrixXd&)>;

  LowRankInverse(Eigen::MatrixXd U, BaseInverse base_inverse);

  [[nodiscard]] Eigen::MatrixXd apply(const Eigen::MatrixXd& rhs) const;
  [[nodiscard]] Eigen::VectorXd apply(const Eigen::VectorXd& rhs) const;
  [[nodiscard]] Eigen::MatrixXd dense() const;

  /// log|I + U^T B^{-1} U|; add log|B| for the full determinant.
  [[nodiscard]] double core_logdet() const;
  /// trace of B^{-1} U (I + U^T B^{-1} U)^{-1} U^T B^{-1}, the correction part of the inverse's trace.
  [[nodiscard]] double correction_trace() const;

  [[nodiscard]] Eigen::Index rows() const noexcept { return U_.rows(); }
  [[nodiscard]] Eigen::Index rank() const noexcept { return U_.cols(); }

 private:
  Eigen::MatrixXd U_;
  Eigen::MatrixXd base_inv_U_;
  Eigen::LLT<Eigen::MatrixXd> core_;
  BaseInverse base_inverse_;
};

/// (scale I + Q Q^T)^{-1}, the regularized inverse used for (K + tau I)^{-1}.
/// Throws ContractViolation if scale <= 0.
[[nodiscard]] LowRankInverse woodbury_reg_inverse(const Eigen::MatrixXd& Q, double scale);

/// (Q Q^T + W^{-1})^{-1} = W - W Q (I + Q^T W Q)^{-1} Q^T W for positive diagonal W.
[[nodiscard]] LowRankInverse woodbury_kw_inverse(const Eigen::MatrixXd& Q, const Eigen::VectorXd& W);

}  // namespace gf
