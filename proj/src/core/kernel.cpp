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

#include "gaussianface/core/kernel.hpp"

#include <cmath>
#include <string>

#include "gaussianface/errors.hpp"
#include "gaussianface/simd/kernel_rows.hpp"

namespace gf {

HyperParams HyperParams::isotropic(int dim, double theta0, double precision, double bias, double noise_inv) {
  HyperParams p;
  p.theta0 = theta0;
  p.ard = Eigen::VectorXd::Constant(dim, precision);
  p.bias = bias;
  p.noise_inv = noise_inv;
  return p;
}

Eigen::VectorXd HyperParams::to_log() const {
  const int d = dim();
  Eigen::VectorXd out(count());
  out[ParamIndex::kTheta0] = std::log(theta0);
  for (int m = 0; m < d; ++m) out[ParamIndex::ard(m)] = std::log(ard[m]);
  out[ParamIndex::bias(d)] = std::log(std::max(bias, kMinBias));
  out[ParamIndex::noise_inv(d)] = std::log(noise_inv);
  return out;
}

HyperParams HyperParams::from_log(const Eigen::Ref<const Eigen::VectorXd>& log_theta) {
  require(log_theta.size() >= 4, "log hyper-parameter vector needs at least 4 entries");
  const int d = static_cast<int>(log_theta.size()) - 3;
  HyperParams p;
  p.theta0 = std::exp(log_theta[ParamIndex::kTheta0]);
  p.ard.resize(d);
  for (int m = 0; m < d; ++m) p.ard[m] = std::exp(log_theta[ParamIndex::ard(m)]);
  p.bias = std::exp(log_theta[ParamIndex::bias(d)]);
  p.noise_inv = std::exp(log_theta[ParamIndex::noise_inv(d)]);
  return p;
}

void HyperParams::validate() const {
  require(dim() >= 1, "kernel needs at least one ARD precision");
  require(std::isfinite(theta0) && theta0 > 0.0, "theta0 must be positive");
  require(std::isfinite(noise_inv) && noise_inv > 0.0, "noise_inv must be positive");
  require(std::isfinite(bias) && bias >= 0.0, "bias must be non-negative");
  for (int m = 0; m < dim(); ++m) require(std::isfinite(ard[m]) && ard[m] > 0.0, "ARD precisions must be positive");
}

namespace {

void check_dim(Eigen::Index got, const HyperParams& theta, const char* what) {
  if (got != theta.dim()) {
    throw ContractViolation(std::string(what) + ": latent dimension " + std::to_string(got) +
                            " does not match kernel dimension " + std::to_string(theta.dim()));
  }
}

simd::PointBlock block_of(const Eigen::MatrixXd& Z) {
  return {Z.data(), static_cast<std::ptrdiff_t>(Z.rows()), static_cast<int>(Z.rows()), static_cast<int>(Z.cols())};
}

}  // namespace

double ard_kernel(const Eigen::Ref<const Eigen::VectorXd>& zi, const Eigen::Ref<const Eigen::VectorXd>& zj,
                  const HyperParams& theta, bool same_index) {
  check_dim(zi.size(), theta, "ard_kernel");
  check_dim(zj.size(), theta, "ard_kernel");
  double s = 0.0;
  for (int m = 0; m < theta.dim(); ++m) {
    const double diff = zi[m] - zj[m];
    s += theta.ard[m] * (diff * diff);
  }
  double k = theta.theta0 * std::exp(-0.5 * s) + theta.bias;
  if (same_index) k += theta.noise();
  return k;
}

Eigen::VectorXd ard_kernel_gradient(const Eigen::Ref<const Eigen::VectorXd>& zi,
                                    const Eigen::Ref<const Eigen::VectorXd>& zj, const HyperParams& theta,
                                    bool same_index) {
  check_dim(zi.size(), theta, "ard_kernel_gradient");
  check_dim(zj.size(), theta, "ard_kernel_gradient");
  const int d = theta.dim();
  double s = 0.0;
  for (int m = 0; m < d; ++m) {
    const double diff = zi[m] - zj[m];
    s += theta.ard[m] * (diff * diff);
  }
  const double e = std::exp(-0.5 * s);
  Eigen::VectorXd g(theta.count());
  g[ParamIndex::kTheta0] = e;
  for (int m = 0; m < d; ++m) {
    const double diff = zi[m] - zj[m];
    g[ParamIndex::ard(m)] = -0.5 * diff * diff * theta.theta0 * e;
  }
  g[ParamIndex::bias(d)] = 1.0;
  g[ParamIndex::noise_inv(d)] = same_index ? -1.0 / (theta.noise_inv * theta.noise_inv) : 0.0;
  return g;
}

Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& Z, const HyperParams& theta) {
  check_dim(Z.cols(), theta, "kernel_matrix");
  const auto n = Z.rows();
  Eigen::MatrixXd K(n, n);
  Eigen::VectorXd query(Z.cols());
  for (Eigen::Index i = 0; i < n; ++i) {
    query = Z.row(i).transpose();
    // Row i against points i..n-1; Z's column-major storage makes that a strided sub-block.
    simd::PointBlock tail{Z.data() + i, static_cast<std::ptrdiff_t>(n), static_cast<int>(n - i),
                          static_cast<int>(Z.cols())};
    simd::gauss_row(tail, query.data(), theta.ard.data(), K.col(i).data() + i);
  }
  K.array() = theta.theta0 * K.array() + theta.bias;
  K.diagonal().array() += theta.noise();
  for (Eigen::Index j = 1; j < n; ++j) {
    for (Eigen::Index i = 0; i < j; ++i) K(i, j) = K(j, i);
  }
  return K;
}

Eigen::MatrixXd cross_kernel(const Eigen::MatrixXd& Za, const Eigen::MatrixXd& Zb, const HyperParams& theta) {
  check_dim(Za.cols(), theta, "cross_kernel");
  check_dim(Zb.cols(), theta, "cross_kernel");
  // Built as the transpose so each gauss_row writes a contiguous column.
  Eigen::MatrixXd Kt(Zb.rows(), Za.rows());
  Eigen::VectorXd query(Za.cols());
  const auto block = block_of(Zb);
  for (Eigen::Index i = 0; i < Za.rows(); ++i) {
    query = Za.row(i).transpose();
    simd::gauss_row(block, query.data(), theta.ard.data(), Kt.col(i).data());
  }
  Eigen::MatrixXd K = Kt.transpose();
  K.array() = theta.theta0 * K.array() + theta.bias;
  return K;
}

Eigen::MatrixXd kernel_matrix_derivative(const Eigen::MatrixXd& Z, const HyperParams& theta, int param) {
  check_dim(Z.cols(), theta, "kernel_matrix_derivative");
  const int d = theta.dim();
  require(param >= 0 && param < theta.count(), "kernel_matrix_derivative: parameter index out of range");
  const auto n = Z.rows();
  if (param == ParamIndex::bias(d)) return Eigen::MatrixXd::Ones(n, n);
  if (param == ParamIndex::noise_inv(d)) {
    return Eigen::MatrixXd::Identity(n, n) * (-1.0 / (theta.noise_inv * theta.noise_inv));
  }
  HyperParams unit = theta;
  unit.theta0 = 1.0;
  unit.bias = 0.0;
  Eigen::MatrixXd E = cross_kernel(Z, Z, unit);
  if (param == ParamIndex::kTheta0) return E;
  const int m = param - 1;
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      const double diff = Z(i, m) - Z(j, m);
      E(i, j) *= -0.5 * diff * diff * theta.theta0;
    }
  }
  return E;
}

double kernel_jitter(const HyperParams& theta) noexcept { return kJitterScale * theta.prior_variance(); }

void kernel_row(const Eigen::MatrixXd& Z, const Eigen::Ref<const Eigen::VectorXd>& z, const HyperParams& theta,
                Eigen::Ref<Eigen::VectorXd> out) {
  check_dim(Z.cols(), theta, "kernel_row");
  check_dim(z.size(), theta, "kernel_row");
  require(out.size() == Z.rows(), "kernel_row: output size mismatch");
  const Eigen::VectorXd query = z;
  simd::gauss_row(block_of(Z), query.data(), theta.ard.data(), out.data());
  out.array() = theta.theta0 * out.array() + theta.bias;
}

Eigen::MatrixXd kernel_row_jacobian(const Eigen::MatrixXd& Z, const Eigen::Ref<const Eigen::VectorXd>& z,
                                    const HyperParams& theta) {
  check_dim(Z.cols(), theta, "kernel_row_jacobian");
  const auto n = Z.rows();
  const int d = theta.dim();
  Eigen::VectorXd e(n);
  const Eigen::VectorXd query = z;
  simd::gauss_row(block_of(Z), query.data(), theta.ard.data(), e.data());
  Eigen::MatrixXd J(n, d);
  for (int m = 0; m < d; ++m) {
    J.col(m) = (-theta.ard[m] * theta.theta0) * ((z[m] - Z.col(m).array()) * e.array()).matrix();
  }
  return J;
}

}  // namespace gf
