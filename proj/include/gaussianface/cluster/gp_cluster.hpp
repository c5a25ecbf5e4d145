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

#include "gaussianface/gp/predictor.hpp"

namespace gf {

/// Non-positive merge_radius / variance_threshold select the data-driven
/// defaults: 1e-3 x latent diameter, and 1.05 x the largest equilibrium variance.
struct ClusterOptions {
  double step = 1.0;        ///< initial Euler step
  double flow_tol = 1e-6;   ///< equilibrium when ||grad sigma^2|| <= flow_tol
  double merge_radius = 0.0;
  int segment_samples = 10;
  double variance_threshold = 0.0;
  int max_iterations = 10000;

  void validate() const;
};

[[nodiscard]] double variance_field(const Eigen::VectorXd& z, const GpClassifier& model);
[[nodiscard]] Eigen::VectorXd variance_gradient(const Eigen::VectorXd& z, const GpClassifier& model);

struct FlowResult {
  Eigen::VectorXd z;
  double variance = 0.0;
  int iterations = 0;
  bool converged = false;
  /// sigma^2 after every accepted Euler step, starting at z0.
  std::vector<double> variance_trace;
};

/// Explicit Euler on dz/dt = -grad sigma^2(z). A step that would raise
/// sigma^2 is halved and retried; accepted steps grow the step again.
[[nodiscard]] FlowResult flow_to_equilibrium(const Eigen::VectorXd& z0, const GpClassifier& model,
                                             const ClusterOptions& opts);

struct ClusterResult {
  std::vector<int> labels;        ///< per input point, 0..C-1 in order of first appearance
  Eigen::MatrixXd centers;        ///< C x d mean of each cluster's equilibria
  Eigen::MatrixXd equilibria;     ///< merged equilibria, E x d
  std::vector<int> equilibrium_of;  ///< per point, index into equilibria
  std::vector<bool> converged;    ///< per point flow status
  double variance_threshold = 0.0;
  double merge_radius = 0.0;
  /// Every accepted step of every flow decreased or kept sigma^2.
  bool descent_held = true;
};

/// Flows every point, merges equilibria within merge_radius, and links two
/// equilibria when every sample on their segment has sigma^2 <= threshold.
[[nodiscard]] ClusterResult cluster(const Eigen::MatrixXd& Z, const GpClassifier& model, const ClusterOptions& opts);

struct Codebook {
  Eigen::MatrixXd centers;    ///< C x d
  Eigen::MatrixXd spreads;    ///< C x d standard deviations, floored at kMinSpread
  Eigen::VectorXd weights;    ///< member fractions, sum to 1
  Eigen::VectorXd probs;      ///< clamped to [kMinProb, 1 - kMinProb]
  Eigen::VectorXd variances;  ///< floored at kMinVariance

  [[nodiscard]] int size() const noexcept { return static_cast<int>(centers.rows()); }
  [[nodiscard]] int dim() const noexcept { return static_cast<int>(centers.cols()); }

  static constexpr double kMinSpread = 1e-6;
  static constexpr double kMinProb = 1e-6;
  static constexpr double kMinVariance = 1e-12;
};

[[nodiscard]] double clamp_prob(double p) noexcept;

/// Member statistics per cluster plus the classifier's prediction at each center.
[[nodiscard]] Codebook build_codebook(const Eigen::MatrixXd& Z, const std::vector<int>& labels,
                                      const GpClassifier& model);

}  // namespace gf
