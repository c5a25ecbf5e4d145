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

#include <atomic>
#include <cstdint>
#include <memory>
#include <optional>

#include <Eigen/Dense>

#include "gaussianface/core/anchors.hpp"
#include "gaussianface/core/kernel.hpp"
#include "gaussianface/core/woodbury.hpp"
#include "gaussianface/gp/laplace.hpp"

namespace gf {

struct PredictorOptions {
  int anchor_threshold = 500;  ///< use the kw-Woodbury path when n exceeds this
  int anchor_count = 100;
  std::uint64_t seed = 1;
  LaplaceOptions laplace;
};

struct LatentPrediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// Probit squashing of a Gaussian latent: Phi(mean / sqrt(1 + variance)).
[[nodiscard]] double squash(double mean, double variance);

/// GP binary classifier on fixed latent points: Laplace fit plus predictive
/// mean, variance and class probability. Immutable after construction;
/// predictions may run concurrently.
class GpClassifier {
 public:
  static GpClassifier fit(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, const HyperParams& theta,
                          const PredictorOptions& opts = {});
  /// Rebuilds a fitted classifier from its stored Newton iterate.
  static GpClassifier restore(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, const HyperParams& theta,
                              const PredictorOptions& opts, const Eigen::VectorXd& alpha, int iterations);

  [[nodiscard]] LatentPrediction predict_latent(const Eigen::Ref<const Eigen::VectorXd>& z) const;
  [[nodiscard]] double predict_prob(const Eigen::Ref<const Eigen::VectorXd>& z) const;
  /// sigma^2(z) = K** - k*^T (K + W^{-1})^{-1} k*, clamped at 0. Label independent.
  [[nodiscard]] double variance(const Eigen::Ref<const Eigen::VectorXd>& z) const;
  [[nodiscard]] Eigen::VectorXd variance_gradient(const Eigen::Ref<const Eigen::VectorXd>& z) const;

  [[nodiscard]] const Eigen::MatrixXd& latents() const noexcept { return Z_; }
  [[nodiscard]] const Eigen::VectorXd& labels() const noexcept { return y_; }
  [[nodiscard]] const HyperParams& theta() const noexcept { return theta_; }
  [[nodiscard]] const LaplaceResult& laplace() const noexcept { return *laplace_; }
  [[nodiscard]] const PredictorOptions& options() const noexcept { return opts_; }
  [[nodiscard]] bool uses_anchors() const noexcept { return kw_ != nullptr; }
  /// K** for any query: theta0 + bias + 1/noise_inv.
  [[nodiscard]] double prior_variance() const noexcept { return theta_.prior_variance(); }

  [[nodiscard]] std::uint64_t variance_queries() const noexcept { return stats_->queries.load(); }
  [[nodiscard]] std::uint64_t variance_clamps() const noexcept { return stats_->clamps.load(); }

 private:
  struct Stats {
    std::atomic<std::uint64_t> queries{0};
    std::atomic<std::uint64_t> clamps{0};
    std::atomic<bool> warned{false};
  };

  GpClassifier() = default;
  static GpClassifier build(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, const HyperParams& theta,
                            const PredictorOptions& opts, const Eigen::VectorXd* alpha, int iterations);
  /// (K + W^{-1})^{-1} k for the active path.
  [[nodiscard]] Eigen::VectorXd apply_kw(const Eigen::VectorXd& k) const;
  [[nodiscard]] double clamp_variance(double v) const;

  Eigen::MatrixXd Z_;
  Eigen::VectorXd y_;
  HyperParams theta_;
  PredictorOptions opts_;
  std::shared_ptr<const LaplaceResult> laplace_;
  Eigen::VectorXd sW_;
  std::shared_ptr<const LowRankInverse> kw_;
  std::shared_ptr<Stats> stats_;
};

}  // namespace gf
