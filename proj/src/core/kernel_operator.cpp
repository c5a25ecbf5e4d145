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

#include "gaussianface/core/kernel_operator.hpp"

#include <cmath>
#include <vector>

#include "gaussianface/errors.hpp"
#include "gaussianface/simd/kernel_rows.hpp"

namespace gf {

KernelOperator KernelOperator::dense(const Eigen::MatrixXd& Z, const HyperParams& theta) {
  theta.validate();
  KernelOperator op;
  op.low_rank_ = false;
  op.Z_ = Z;
  op.theta_ = theta;
  op.noise_coeff_ = 0.0;
  op.prior_coeff_ = kJitterScale;
  op.shift_ = kernel_jitter(theta);
  op.K_ = kernel_matrix(Z, theta);
  op.K_.diagonal().array() += op.shift_;
  op.llt_.compute(op.K_);
  if (op.llt_.info() != Eigen::Success) throw NumericalError("kernel matrix is not positive definite after jitter");
  return op;
}

KernelOperator KernelOperator::low_rank(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& anchors,
                                        const HyperParams& theta, double tau_scale) {
  theta.validate();
  require(tau_scale >= 0.0, "tau scale must be non-negative");
  KernelOperator op;
  op.low_rank_ = true;
  op.Z_ = Z;
  op.theta_ = theta;
  op.noise_coeff_ = 1.0;
  op.prior_coeff_ = kJitterScale + tau_scale;
  op.shift_ = theta.noise() + op.prior_coeff_ * theta.prior_variance();
  op.approx_ = std::make_shared<const AnchorApprox>(anchor_approx(Z, anchors, theta));
  op.inv_ = std::make_shared<const LowRankInverse>(woodbury_reg_inverse(op.approx_->Q, op.shift_));
  return op;
}

Eigen::MatrixXd KernelOperator::solve(const Eigen::MatrixXd& rhs) const {
  return low_rank_ ? inv_->apply(rhs) : Eigen::MatrixXd(llt_.solve(rhs));
}

Eigen::MatrixXd KernelOperator::multiply(const Eigen::MatrixXd& rhs) const {
  if (!low_rank_) return K_ * rhs;
  const auto& Q = approx_->Q;
  Eigen::MatrixXd out = Q * (Q.transpose() * rhs);
  out += shift_ * rhs;
  return out;
}

double KernelOperator::logdet() const {
  if (!low_rank_) return 2.0 * llt_.matrixLLT().diagonal().array().log().sum();
  return static_cast<double>(size()) * std::log(shift_) + inv_->core_logdet();
}

double KernelOperator::inverse_trace() const {
  if (!low_rank_) return inverse().trace();
  return static_cast<double>(size()) / shift_ - inv_->correction_trace();
}

Eigen::MatrixXd KernelOperator::matrix() const {
  if (!low_rank_) return K_;
  Eigen::MatrixXd out = approx_->Q * approx_->Q.transpose();
  out.diagonal().array() += shift_;
  return out;
}

const Eigen::MatrixXd& KernelOperator::inverse() const {
  if (!inverse_cache_) {
    inverse_cache_ = std::make_shared<Eigen::MatrixXd>(
        low_rank_ ? inv_->dense() : Eigen::MatrixXd(llt_.solve(Eigen::MatrixXd::Identity(size(), size()))));
  }
  return *inverse_cache_;
}

KernelCotangent::KernelCotangent(const KernelOperator& op) : op_(op) {
  const auto n = op.size();
  if (op.is_low_rank()) {
    const auto q = op.anchors().anchors.rows();
    GBtT_ = Eigen::MatrixXd::Zero(q, n);
    BGBt_ = Eigen::MatrixXd::Zero(q, q);
  } else {
    G_ = Eigen::MatrixXd::Zero(n, n);
  }
}

void KernelCotangent::add_outer(double c, const Eigen::VectorXd& u) {
  const Eigen::MatrixXd U = u;
  add_outer(c, U);
}

void KernelCotangent::add_outer(double c, const Eigen::MatrixXd& U) {
  if (c == 0.0) return;
  if (!op_.is_low_rank()) {
    G_.noalias() += c * (U * U.transpose());
    trace_ += c * U.squaredNorm();
    return;
  }
  const Eigen::MatrixXd BU = op_.anchors().B * U;
  GBtT_.noalias() += c * (BU * U.transpose());
  BGBt_.noalias() += c * (BU * BU.transpose());
  trace_ += c * U.squaredNorm();
}

void KernelCotangent::add_inverse(double c) {
  if (c == 0.0) return;
  if (!op_.is_low_rank()) {
    G_ += c * op_.inverse();
    trace_ += c * op_.inverse().trace();
    return;
  }
  const auto& B = op_.anchors().B;
  const Eigen::MatrixXd KinvBt = op_.solve(B.transpose());
  GBtT_.noalias() += c * KinvBt.transpose();
  BGBt_.noalias() += c * (B * KinvBt);
  trace_ += c * op_.inverse_trace();
}

Eigen::VectorXd KernelCotangent::theta_gradient() const {
  Eigen::VectorXd g;
  contract(&g, nullptr);
  return g;
}

Eigen::MatrixXd KernelCotangent::latent_gradient() const {
  Eigen::MatrixXd z;
  contract(nullptr, &z);
  return z;
}

namespace {

struct RowSums {
  double e = 0.0;
  Eigen::VectorXd sq;
};

simd::PointBlock block_of(const Eigen::MatrixXd& Z) {
  return {Z.data(), static_cast<std::ptrdiff_t>(Z.rows()), static_cast<int>(Z.rows()), static_cast<int>(Z.cols())};
}

// Contracts weights W (column i = weights of row i of `rows` against `pts`)
// with the Gaussian part of k(rows_i, pts_l). Optionally writes the per-row
// linear moments into `lin` (rows x d).
RowSums contract_block(const Eigen::MatrixXd& rows, const Eigen::MatrixXd& pts, const Eigen::MatrixXd& weights,
                       const HyperParams& theta, Eigen::MatrixXd* lin) {
  const int d = theta.dim();
  RowSums sums;
  sums.sq = Eigen::VectorXd::Zero(d);
  const auto block = block_of(pts);
  std::vector<double> acc(static_cast<std::size_t>(1 + 2 * d));
  Eigen::VectorXd query(d);
  if (lin != nullptr) lin->setZero(rows.rows(), d);
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    std::fill(acc.begin(), acc.end(), 0.0);
    query = rows.row(i).transpose();
    simd::gauss_row_contract(block, query.data(), theta.ard.data(), weights.col(i).data(), acc.data());
    sums.e += acc[0];
    for (int m = 0; m < d; ++m) sums.sq[m] += acc[static_cast<std::size_t>(1 + m)];
    if (lin != nullptr) {
      for (int m = 0; m < d; ++m) (*lin)(i, m) = acc[static_cast<std::size_t>(1 + d + m)];
    }
  }
  return sums;
}

}  // namespace

void KernelCotangent::contract(Eigen::VectorXd* theta_grad, Eigen::MatrixXd* latent_grad) const {
  const HyperParams& th = op_.theta();
  const int d = th.dim();
  const double nu = th.noise();
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(th.count());
  Eigen::MatrixXd lin;
  const bool want_latent = latent_grad != nullptr;

  if (!op_.is_low_rank()) {
    const auto& Z = op_.latents();
    const RowSums s = contract_block(Z, Z, G_, th, want_latent ? &lin : nullptr);
    grad[ParamIndex::kTheta0] = th.theta0 * s.e;
    for (int m = 0; m < d; ++m) grad[ParamIndex::ard(m)] = -0.5 * th.theta0 * th.ard[m] * s.sq[m];
    grad[ParamIndex::bias(d)] = th.bias * G_.sum();
    grad[ParamIndex::noise_inv(d)] = -nu * G_.trace();
    if (want_latent) {
      // dK_il/dz_im = -theta0 ard_m (z_im - z_lm) e_il, counted from both (i,l) and (l,i).
      for (int m = 0; m < d; ++m) lin.col(m) *= -2.0 * th.theta0 * th.ard[m];
      *latent_grad = std::move(lin);
    }
  } else {
    const auto& approx = op_.anchors();
    const auto& Z = op_.latents();
    const Eigen::MatrixXd Wnq = 2.0 * GBtT_;
    const Eigen::MatrixXd Wqq = -BGBt_;
    const RowSums snq = contract_block(Z, approx.anchors, Wnq, th, want_latent ? &lin : nullptr);
    const RowSums sqq = contract_block(approx.anchors, approx.anchors, Wqq, th, nullptr);
    grad[ParamIndex::kTheta0] = th.theta0 * (snq.e + sqq.e);
    for (int m = 0; m < d; ++m) {
      grad[ParamIndex::ard(m)] = -0.5 * th.theta0 * th.ard[m] * (snq.sq[m] + sqq.sq[m]);
    }
    grad[ParamIndex::bias(d)] = th.bias * (Wnq.sum() + Wqq.sum());
    // K(anchors, anchors) carries jitter proportional to theta0 + bias.
    const double jitter_coeff = approx.anchor_jitter / (th.theta0 + th.bias);
    grad[ParamIndex::kTheta0] += Wqq.trace() * jitter_coeff * th.theta0;
    grad[ParamIndex::bias(d)] += Wqq.trace() * jitter_coeff * th.bias;
    if (want_latent) {
      for (int m = 0; m < d; ++m) lin.col(m) *= -th.theta0 * th.ard[m];
      *latent_grad = std::move(lin);
    }
  }

  // Diagonal shift s = noise_coeff * nu + prior_coeff * (theta0 + bias + nu).
  const double pc = op_.shift_prior_coeff();
  const double nc = op_.shift_noise_coeff();
  grad[ParamIndex::kTheta0] += trace_ * pc * th.theta0;
  grad[ParamIndex::bias(d)] += trace_ * pc * th.bias;
  grad[ParamIndex::noise_inv(d)] += trace_ * (-nu) * (nc + pc);

  if (theta_grad != nullptr) *theta_grad = std::move(grad);
}

}  // namespace gf
