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

#include "gaussianface/core/woodbury.hpp"

#include <cmath>

#include "gaussianface/errors.hpp"

namespace gf {

LowRankInverse::LowRankInverse(Eigen::MatrixXd U, BaseInverse base_inverse)
    : U_(std::move(U)), base_inverse_(std::move(base_inverse)) {
  base_inv_U_ = base_inverse_(U_);
  const auto q = U_.cols();
  Eigen::MatrixXd core = Eigen::MatrixXd::Identity(q, q);
  core.noalias() += U_.transpose() * base_inv_U_;
  core_.compute(core);
  if (core_.info() != Eigen::Success) {
    // I + U^T B^{-1} U is SPD in exact arithmetic; retry once with jitter.
    core.diagonal().array() += 1e-10 * core.diagonal().mean();
    core_.compute(core);
    if (core_.info() != Eigen::Success) throw NumericalError("Woodbury core system is singular");
  }
}

Eigen::MatrixXd LowRankInverse::apply(const Eigen::MatrixXd& rhs) const {
  Eigen::MatrixXd out = base_inverse_(rhs);
  if (U_.cols() == 0) return out;
  const Eigen::MatrixXd proj = base_inv_U_.transpose() * rhs;
  out.noalias() -= base_inv_U_ * core_.solve(proj);
  return out;
}

Eigen::VectorXd LowRankInverse::apply(const Eigen::VectorXd& rhs) const {
  const Eigen::MatrixXd as_matrix = rhs;
  return apply(as_matrix).col(0);
}

Eigen::MatrixXd LowRankInverse::dense() const {
  return apply(Eigen::MatrixXd(Eigen::MatrixXd::Identity(U_.rows(), U_.rows())));
}

double LowRankInverse::core_logdet() const {
  if (U_.cols() == 0) return 0.0;
  return 2.0 * core_.matrixLLT().diagonal().array().log().sum();
}

double LowRankInverse::correction_trace() const {
  if (U_.cols() == 0) return 0.0;
  // tr(V C^{-1} V^T) = tr(C^{-1} V^T V) with V = B^{-1} U.
  const Eigen::MatrixXd gram = base_inv_U_.transpose() * base_inv_U_;
  return core_.solve(gram).trace();
}

LowRankInverse woodbury_reg_inverse(const Eigen::MatrixXd& Q, double scale) {
  require(scale > 0.0 && std::isfinite(scale), "woodbury_reg_inverse: scale must be positive");
  const double inv = 1.0 / scale;
  return LowRankInverse(Q, [inv](const Eigen::MatrixXd& x) -> Eigen::MatrixXd { return inv * x; });
}

LowRankInverse woodbury_kw_inverse(const Eigen::MatrixXd& Q, const Eigen::VectorXd& W) {
  require(W.size() == Q.rows(), "woodbury_kw_inverse: W length must match Q rows");
  for (Eigen::Index i = 0; i < W.size(); ++i) {
    require(W[i] > 0.0 && std::isfinite(W[i]), "woodbury_kw_inverse: W entries must be positive");
  }
  return LowRankInverse(Q, [W](const Eigen::MatrixXd& x) -> Eigen::MatrixXd { return W.asDiagonal() * x; });
}

}  // namespace gf
