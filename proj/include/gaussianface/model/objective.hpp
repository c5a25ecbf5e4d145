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

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "gaussianface/core/kernel.hpp"
#include "gaussianface/kfda/kfda.hpp"

namespace gf {

enum class DomainRole { kTarget, kSource };

/// One domain's observations (rows of X), labels and latent positions.
struct DomainData {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  Eigen::MatrixXd Z;
  DomainRole role = DomainRole::kTarget;

  [[nodiscard]] Eigen::Index size() const noexcept { return X.rows(); }
};

/// Target plus S >= 0 sources.
struct ModelData {
  DomainData target;
  std::vector<DomainData> sources;

  /// Throws ContractViolation on inconsistent shapes or a single-class domain.
  void validate() const;
};

struct AnchorConfig {
  int threshold = 500;  ///< kernel blocks larger than this use anchors
  int count = 100;
  double tau_scale = 1e-6;  ///< tau = tau_scale * mean(diag K)
};

struct ObjectiveConfig {
  double beta = 0.0;
  PriorConfig prior;
  AnchorConfig anchors;
  /// With false, the source terms are never evaluated and L = -l_T.
  bool multitask_enabled = true;
};

/// Anchor sets for every kernel block; an empty optional means dense.
struct AnchorPlan {
  std::optional<Eigen::MatrixXd> target;
  std::vector<std::optional<Eigen::MatrixXd>> sources;
  std::vector<std::optional<Eigen::MatrixXd>> joint;
};

/// k-means anchors (on the current latents) for every block above the threshold.
[[nodiscard]] AnchorPlan plan_anchors(const ModelData& data, const AnchorConfig& cfg, std::uint64_t seed);

/// Log posterior of one block, its parts, and its gradients.
struct PosteriorTerms {
  double value = 0.0;  ///< gplvm + prior + theta_prior
  double gplvm = 0.0;
  double prior = 0.0;
  double theta_prior = 0.0;
  double j_star = 0.0;
  Eigen::VectorXd grad_theta;  ///< d value / d log theta
  Eigen::MatrixXd grad_Z;      ///< d value / dZ
};

struct GradientRequest {
  bool theta = false;
  bool latent = false;
};

/// -(ND/2) log 2pi - (D/2) log|K| - 1/2 tr(K^{-1} X X^T), dense path with jitter.
[[nodiscard]] double gplvm_loglik(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z, const HyperParams& theta);

/// log theta prior: sum_j log theta_j (zero bias floored at HyperParams::kMinBias).
[[nodiscard]] double theta_log_prior(const HyperParams& theta);

[[nodiscard]] PosteriorTerms block_posterior(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                                             const Eigen::MatrixXd& Z, const HyperParams& theta,
                                             const ObjectiveConfig& cfg, const Eigen::MatrixXd* anchors,
                                             GradientRequest request);

/// l_i = gplvm + log p(Z_i) + log p(theta), normalizers dropped.
[[nodiscard]] double domain_log_posterior(const DomainData& dom, const HyperParams& theta,
                                          const ObjectiveConfig& cfg);

/// l_{T,i}: domain_log_posterior of the concatenation [target; source].
[[nodiscard]] double joint_log_posterior(const DomainData& target, const DomainData& source,
                                         const HyperParams& theta, const ObjectiveConfig& cfg);

/// Stacks two domains row-wise (X, y, Z), keeping the first one's role.
[[nodiscard]] DomainData concatenate(const DomainData& first, const DomainData& second);

struct ObjectiveResult {
  double value = 0.0;
  double l_target = 0.0;
  std::vector<double> l_source;
  std::vector<double> l_joint;
  Eigen::VectorXd grad_theta;
  Eigen::MatrixXd grad_Z_target;
  std::vector<Eigen::MatrixXd> grad_Z_sources;
};

/// L = -l_T + beta P_T l_T + (beta/S) sum_i (P_Ti l_i - P_Ti l_Ti), P = exp(l/N),
/// with N the row count of the block. Without sources, with beta = 0 or with
/// the multi-task path disabled, L = -l_T.
[[nodiscard]] ObjectiveResult evaluate_model(const ModelData& data, const HyperParams& theta,
                                             const ObjectiveConfig& cfg, const AnchorPlan* plan,
                                             GradientRequest request);

[[nodiscard]] double model_objective(const ModelData& data, const HyperParams& theta, const ObjectiveConfig& cfg);
/// dL/dlog(theta_j).
[[nodiscard]] Eigen::VectorXd model_gradient_theta(const ModelData& data, const HyperParams& theta,
                                                   const ObjectiveConfig& cfg);

[[nodiscard]] bool multitask_active(const ModelData& data, const ObjectiveConfig& cfg) noexcept;

}  // namespace gf
