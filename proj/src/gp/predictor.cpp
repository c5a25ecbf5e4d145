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

#include "gaussianface/gp/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gaussianface/errors.hpp"
#include "gaussianface/gp/probit.hpp"

namespace gf {

double squash(double mean, double variance) { return probit::cdf(mean / std::sqrt(1.0 + variance)); }

GpClassifier GpClassifier::fit(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, const HyperParams& theta,
                               const PredictorOptions& opts) {
  return build(Z, y, theta, opts, nullptr, 0);
}

GpClassifier GpClassifier::restore(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, const HyperParams& theta,
                                   const PredictorOptions& opts, const Eigen::VectorXd& alpha, int iterations) {
  return build(Z, y, theta, opts, &alpha, iterations);
}

GpClassifier GpClassifier::build(const Eigen::MatrixXd& Z, const Eigen::VectorXd& y, const HyperParams& theta,
                                 const PredictorOptions& opts, const Eigen::VectorXd* alpha, int iterations) {
  theta.validate();
  require(Z.rows() == y.size(), "GpClassifier: latent count does not match label count");
  require(Z.cols() == theta.dim(), "GpClassifier: latent dimension does not match kernel");
  GpClassifier c;
  c.Z_ = Z;
  c.y_ = y;
  c.theta_ = theta;
  c.opts_ = opts;
  c.stats_ = std::make_shared<Stats>();

  Eigen::MatrixXd K = kernel_matrix(Z, theta);
  const double jitter = kernel_jitter(theta);
  K.diagonal().array() += jitter;
  c.laplace_ = std::make_shared<const LaplaceResult>(alpha ? laplace_from_alpha(K, y, *alpha, iterations)
                                                           : laplace_mode(K, y, opts.laplace));
  c.sW_ = c.laplace_->W.array().sqrt();

  const auto n = Z.rows();
  if (n > opts.anchor_threshold) {
    const int q = static_cast<int>(std::min<Eigen::Index>(opts.anchor_count, n));
    const Eigen::MatrixXd anchors = kmeans_anchors(Z, q, opts.seed);
    const AnchorApprox approx = anchor_approx(Z, anchors, theta);
    // K + W^{-1} ~ Q Q^T + diag(1/W + noise + jitter); fold the diagonal into W.
    const double diag = theta.noise() + jitter;
    Eigen::VectorXd Wp(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double w = c.laplace_->W[i];
      Wp[i] = std::max(w / (1.0 + diag * w), std::numeric_limits<double>::min());
    }
    c.kw_ = std::make_shared<const LowRankInverse>(woodbury_kw_inverse(approx.Q, Wp));
  }
  return c;
}

Eigen::VectorXd GpClassifier::apply_kw(const Eigen::VectorXd& k) const {
  if (kw_) return kw_->apply(k);
  // (K + W^{-1})^{-1} = W^1/2 B^{-1} W^1/2
  const Eigen::VectorXd v = laplace_->B_llt.solve(Eigen::VectorXd(sW_.cwiseProduct(k)));
  return sW_.cwiseProduct(v);
}

double GpClassifier::clamp_variance(double v) const {
  const auto queries = stats_->queries.fetch_add(1) + 1;
  if (v >= 0.0) return v;
  const auto clamps = stats_->clamps.fetch_add(1) + 1;
  if (queries >= 100 && static_cast<double>(clamps) > 0.01 * static_cast<double>(queries) &&
      !stats_->warned.exchange(true)) {
    warn("predictive variance clamped at zero for more than 1% of queries (" + std::to_string(clamps) + " of " +
         std::to_string(queries) + ")");
  }
  return 0.0;
}

LatentPrediction GpClassifier::predict_latent(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  Eigen::VectorXd k(Z_.rows());
  kernel_row(Z_, z, theta_, k);
  LatentPrediction p;
  p.mean = k.dot(laplace_->grad_lik);
  p.variance = clamp_variance(prior_variance() - k.dot(apply_kw(k)));
  return p;
}

double GpClassifier::predict_prob(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  const auto p = predict_latent(z);
  return squash(p.mean, p.variance);
}

double GpClassifier::variance(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  Eigen::VectorXd k(Z_.rows());
  kernel_row(Z_, z, theta_, k);
  return clamp_variance(prior_variance() - k.dot(apply_kw(k)));
}

Eigen::VectorXd GpClassifier::variance_gradient(const Eigen::Ref<const Eigen::VectorXd>& z) const {
  Eigen::VectorXd k(Z_.rows());
  kernel_row(Z_, z, theta_, k);
  const Eigen::MatrixXd J = kernel_row_jacobian(Z_, z, theta_);
  return -2.0 * J.transpose() * apply_kw(k);
}

}  // namespace gf
