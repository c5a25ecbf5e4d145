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

#include <Eigen/Dense>

#include "gaussianface/core/kernel.hpp"

namespace gf {

/// k-means centers used as anchors: k-means++ seeding from `seed`, then
/// Lloyd iterations until assignments stop changing or `max_iterations`.
/// Deterministic for a fixed seed. Throws ContractViolation unless 1 <= q <= n.
[[nodiscard]] Eigen::MatrixXd kmeans_anchors(const Eigen::MatrixXd& Z, int q, std::uint64_t seed,
                                             int max_iterations = 100);

/// Low-rank factor of the kernel's smooth part (everything but the delta term).
/// Q = K(Z, anchors) L^{-T} with L L^T = K(anchors, anchors) + jitter, so that
/// Q Q^T is the Nystrom approximation and equals the smooth kernel exactly
/// when the anchors are the data points.
struct AnchorApprox {
  Eigen::MatrixXd anchors;  ///< q x d
  Eigen::MatrixXd Q;        ///< n x q
  Eigen::MatrixXd Knq;      ///< n x q cross-covariance
  Eigen::MatrixXd B;        ///< q x n, K(anchors, anchors)^{-1} K(anchors, Z)
  double anchor_jitter = 0.0;
};

[[nodiscard]] AnchorApprox anchor_approx(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& anchors,
                                         const HyperParams& theta);

}  // namespace gf
