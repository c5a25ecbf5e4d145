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
#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "gaussianface/core/kernel_operator.hpp"
#include "gaussianface/gp/predictor.hpp"
#include "gaussianface/model/objective.hpp"
#include "gaussianface/model/scg.hpp"

namespace gf {

struct TrainConfig {
  int latent_dim = 2;
  ObjectiveConfig objective;
  /// Options for each SCG block (theta block and latent block).
  ScgOptions scg;
  int outer_iterations = 20;
  /// Stop when an outer iteration improves L by at most this fraction of |L|.
  double outer_tolerance = 1e-6;
  std::uint64_t seed = 1;
  PredictorOptions predictor;
  int estimate_iterations = 100;
};

/// Result of training. X is stored centered; `target_mean` and
/// `source_means` restore the original coordinates.
struct TrainedModel {
  TrainConfig config;
  HyperParams theta;
  ModelData data;
  Eigen::VectorXd target_mean;
  std::vector<Eigen::VectorXd> source_means;
  AnchorPlan anchors;
  std::vector<double> trace;  ///< L after initialization and after every outer iteration
  int outer_iterations = 0;
  bool converged = false;
  std::shared_ptr<const GpClassifier> classifier;
  /// GP-regression state for estimate_latent: factorized target kernel and K^{-1} X.
  std::shared_ptr<const KernelOperator> regression;
  Eigen::MatrixXd regression_weights;

  /// Rebuilds `regression` and `regression_weights` from theta and the target domain.
  void build_regression_cache();
};

/// PCA scores of centered X on the top d principal directions; each
/// direction's largest-magnitude component is made positive.
[[nodiscard]] Eigen::MatrixXd pca_latents(const Eigen::MatrixXd& X_centered, int d);

/// Kernel parameters scaled to the data: theta0 = mean column variance of X,
/// ard_m = 1/var(Z_m), bias = 1e-3 theta0, noise = 0.1 theta0.
[[nodiscard]] HyperParams initial_theta(const Eigen::MatrixXd& X_centered, const Eigen::MatrixXd& Z);

/// Alternates SCG over log theta and over the latents until the outer
/// improvement falls below tolerance, then fits the target classifier.
/// `domains.target.Z` and sources' Z are ignored; they are initialized by PCA.
[[nodiscard]] TrainedModel train(const ModelData& domains, const TrainConfig& cfg);

struct LatentEstimate {
  Eigen::VectorXd z;
  double log_density = 0.0;
  double initial_log_density = 0.0;
  int nearest_index = -1;
  bool optimizer_failed = false;
};

/// GP-regression predictive log density of x (already centered) at latent z:
/// log N(x; K(z,Z) K^{-1} X, v(z) I).
[[nodiscard]] double latent_log_density(const TrainedModel& model, const Eigen::VectorXd& x_centered,
                                        const Eigen::VectorXd& z, Eigen::VectorXd* grad = nullptr);

/// Latent position of a new target-domain observation (original coordinates).
[[nodiscard]] LatentEstimate estimate_latent(const Eigen::VectorXd& x_star, const TrainedModel& model);

}  // namespace gf
