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

#include <Eigen/Dense>

namespace gf {

/// ARD squared-exponential kernel with constant bias and a noise term:
///   k(zi, zj) = theta0 * exp(-1/2 sum_m ard_m (zi_m - zj_m)^2) + bias + [i == j] / noise_inv
/// The noise term is applied by index identity, never by value equality.
struct HyperParams {
  double theta0 = 1.0;
  Eigen::VectorXd ard;
  double bias = 0.0;
  double noise_inv = 1.0;

  static HyperParams isotropic(int dim, double theta0, double precision, double bias, double noise_inv);

  [[nodiscard]] int dim() const noexcept { return static_cast<int>(ard.size()); }
  /// Number of hyper-parameters, d + 3.
  [[nodiscard]] int count() const noexcept { return dim() + 3; }
  [[nodiscard]] double noise() const noexcept { return 1.0 / noise_inv; }
  /// Self-covariance of a point with itself, delta term included.
  [[nodiscard]] double prior_variance() const noexcept { return theta0 + bias + noise(); }

  /// Packed log-coordinates [log theta0, log ard..., log bias, log noise_inv].
  /// A zero bias is packed as log(kMinBias).
  [[nodiscard]] Eigen::VectorXd to_log() const;
  static HyperParams from_log(const Eigen::Ref<const Eigen::VectorXd>& log_theta);

  /// Throws ContractViolation unless theta0, ard, noise_inv > 0 and bias >= 0.
  void validate() const;

  static constexpr double kMinBias = 1e-12;
};

/// Index of each parameter in the packed vector.
struct ParamIndex {
  static constexpr int kTheta0 = 0;
  static int ard(int m) { return 1 + m; }
  static int bias(int dim) { return dim + 1; }
  static int noise_inv(int dim) { return dim + 2; }
};

[[nodiscard]] double ard_kernel(const Eigen::Ref<const Eigen::VectorXd>& zi,
                                const Eigen::Ref<const Eigen::VectorXd>& zj, const HyperParams& theta,
                                bool same_index);

/// Derivatives of ard_kernel with respect to every theta_j (linear, not log, coordinates).
[[nodiscard]] Eigen::VectorXd ard_kernel_gradient(const Eigen::Ref<const Eigen::VectorXd>& zi,
                                                  const Eigen::Ref<const Eigen::VectorXd>& zj,
                                                  const HyperParams& theta, bool same_index);

/// K_ij = ard_kernel(z_i, z_j, theta, i == j). Rows of Z are latent points.
/// Exactly symmetric: the upper triangle is computed and mirrored.
[[nodiscard]] Eigen::MatrixXd kernel_matrix(const Eigen::MatrixXd& Z, const HyperParams& theta);

/// A x B cross-covariance; never includes the delta term.
[[nodiscard]] Eigen::MatrixXd cross_kernel(const Eigen::MatrixXd& Za, const Eigen::MatrixXd& Zb,
                                           const HyperParams& theta);

/// Elementwise dK/dtheta_j for the self kernel (linear coordinates).
[[nodiscard]] Eigen::MatrixXd kernel_matrix_derivative(const Eigen::MatrixXd& Z, const HyperParams& theta,
                                                       int param);

/// Diagonal jitter added before factorizing K: 1e-8 * mean(diag K).
inline constexpr double kJitterScale = 1e-8;
[[nodiscard]] double kernel_jitter(const HyperParams& theta) noexcept;

/// Kernel row k(z, Z) without the delta term, via the SIMD dispatch.
void kernel_row(const Eigen::MatrixXd& Z, const Eigen::Ref<const Eigen::VectorXd>& z,
                const HyperParams& theta, Eigen::Ref<Eigen::VectorXd> out);

/// Jacobian of kernel_row with respect to z: column m holds dk(z, Z)/dz_m.
[[nodiscard]] Eigen::MatrixXd kernel_row_jacobian(const Eigen::MatrixXd& Z,
                                                  const Eigen::Ref<const Eigen::VectorXd>& z,
                                                  const HyperParams& theta);

}  // namespace gf
