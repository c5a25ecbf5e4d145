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

#include <memory>
#include <optional>

#include <Eigen/Dense>

#include "gaussianface/core/anchors.hpp"
#include "gaussianface/core/kernel.hpp"
#include "gaussianface/core/woodbury.hpp"

namespace gf {

/// The factorized kernel matrix K~ every objective term works with.
///
/// Dense:     K~ = K(Z) + s I,      s = jitter = 1e-8 mean(diag K)
/// Low-rank:  K~ = Q Q^T + s I,     s = 1/noise_inv + jitter + tau
/// where Q Q^T is the anchor (Nystrom) approximation of the smooth part.
/// The shift s is an affine function of theta:
///   s = noise_coeff / noise_inv + prior_coeff * (theta0 + bias + 1/noise_inv).
class KernelOperator {
 public:
  static KernelOperator dense(const Eigen::MatrixXd& Z, const HyperParams& theta);
  static KernelOperator low_rank(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& anchors,
                                 const HyperParams& theta, double tau_scale);

  [[nodiscard]] bool is_low_rank() const noexcept { return low_rank_; }
  [[nodiscard]] Eigen::Index size() const noexcept { return Z_.rows(); }
  [[nodiscard]] const Eigen::MatrixXd& latents() const noexcept { return Z_; }
  [[nodiscard]] const HyperParams& theta() const noexcept { return theta_; }
  [[nodiscard]] double shift() const noexcept { return shift_; }
  [[nodiscard]] double shift_noise_coeff() const noexcept { return noise_coeff_; }
  [[nodiscard]] double shift_prior_coeff() const noexcept { return prior_coeff_; }

  [[nodiscard]] Eigen::MatrixXd solve(const Eigen::MatrixXd& rhs) const;
  [[nodiscard]] Eigen::MatrixXd multiply(const Eigen::MatrixXd& rhs) const;
  [[nodiscard]] double logdet() const;
  [[nodiscard]] double inverse_trace() const;
  /// Materialized K~ (tests and small problems).
  [[nodiscard]] Eigen::MatrixXd matrix() const;
  /// Materialized K~^{-1}; cached for the dense path.
  [[nodiscard]] const Eigen::MatrixXd& inverse() const;

  /// Low-rank internals; valid only when is_low_rank().
  [[nodiscard]] const AnchorApprox& anchors() const { return *approx_; }

 private:
  KernelOperator() = default;

  bool low_rank_ = false;
  Eigen::MatrixXd Z_;
  HyperParams theta_;
  double shift_ = 0.0;
  double noise_coeff_ = 0.0;
  double prior_coeff_ = 0.0;

  // dense
  Eigen::MatrixXd K_;
  Eigen::LLT<Eigen::MatrixXd> llt_;
  mutable std::shared_ptr<Eigen::MatrixXd> inverse_cache_;

  // low-rank
  std::shared_ptr<const AnchorApprox> approx_;
  std::shared_ptr<const LowRankInverse> inv_;
};

/// Accumulates G = dF/dK~ for a scalar F of the kernel matrix, then contracts
/// it with dK~/dtheta (log coordinates) and dK~/dZ. In the low-rank mode G is
/// never materialized; only G B^T, B G B^T and tr(G) are kept.
class KernelCotangent {
 public:
  explicit KernelCotangent(const KernelOperator& op);

  /// G += c u u^T
  void add_outer(double c, const Eigen::VectorXd& u);
  /// G += c U U^T
  void add_outer(double c, const Eigen::MatrixXd& U);
  /// G += c K~^{-1}
  void add_inverse(double c);

  /// dF/dlog(theta_j) for every packed parameter.
  [[nodiscard]] Eigen::VectorXd theta_gradient() const;
  /// dF/dZ, n x d.
  [[nodiscard]] Eigen::MatrixXd latent_gradient() const;
  /// Both gradients in one pass; either pointer may be null.
  void contract(Eigen::VectorXd* theta_grad, Eigen::MatrixXd* latent_grad) const;

 private:

  const KernelOperator& op_;
  Eigen::MatrixXd G_;     // dense: n x n
  Eigen::MatrixXd GBtT_;  // low-rank: (G B^T)^T, q x n
  Eigen::MatrixXd BGBt_;  // low-rank: q x q
  double trace_ = 0.0;
};

}  // namespace gf
