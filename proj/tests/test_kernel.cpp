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

#include <gtest/gtest.h>

#include <cmath>

#include "gaussianface/core/kernel.hpp"
#include "gaussianface/errors.hpp"
#include "support.hpp"

namespace gf {
namespace {

TEST(Kernel, ZeroDistanceWithDelta) {
  HyperParams th;
  th.theta0 = 1.0;
  th.ard = Eigen::VectorXd::Constant(1, 1.0);
  th.bias = 0.0;
  th.noise_inv = 2.0;
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(1);
  EXPECT_EQ(ard_kernel(z, z, th, true), 1.5);
  EXPECT_EQ(ard_kernel(z, z, th, false), 1.0);
}

TEST(Kernel, DirectFormula) {
  HyperParams th;
  th.theta0 = 2.0;
  th.ard = Eigen::Vector2d(0.5, 3.0);
  th.bias = 0.25;
  th.noise_inv = 4.0;
  const Eigen::Vector2d a(0.3, -1.0);
  const Eigen::Vector2d b(-0.2, 0.5);
  const double expect = 2.0 * std::exp(-0.5 * (0.5 * 0.25 + 3.0 * 2.25)) + 0.25;
  EXPECT_NEAR(ard_kernel(a, b, th, false), expect, 1e-15);
}

TEST(Kernel, DeltaIsIndexIdentityNotValueEquality) {
  Eigen::MatrixXd Z(3, 2);
  Z << 0, 0, 0, 0, 1, 1;  // rows 0 and 1 coincide
  const HyperParams th = HyperParams::isotropic(2, 1.0, 1.0, 0.0, 2.0);
  const Eigen::MatrixXd K = kernel_matrix(Z, th);
  EXPECT_EQ(K(0, 0), 1.5);
  EXPECT_EQ(K(0, 1), 1.0);
  const Eigen::MatrixXd C = cross_kernel(Z, Z, th);
  EXPECT_EQ(C(0, 0), 1.0);
}

TEST(Kernel, MatrixIsExactlySymmetric) {
  Rng rng(1);
  const Eigen::MatrixXd Z = testing::random_matrix(rng, 25, 3);
  HyperParams th = HyperParams::isotropic(3, 1.7, 0.4, 0.1, 5.0);
  th.ard[1] = 2.2;
  const Eigen::MatrixXd K = kernel_matrix(Z, th);
  EXPECT_TRUE((K - K.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST(Kernel, PackedLogRoundTrip) {
  HyperParams th = HyperParams::isotropic(2, 1.7, 0.4, 0.1, 5.0);
  const HyperParams back = HyperParams::from_log(th.to_log());
  EXPECT_NEAR(back.theta0, th.theta0, 1e-15);
  EXPECT_NEAR(back.bias, th.bias, 1e-16);
  EXPECT_NEAR(back.noise_inv, th.noise_inv, 1e-14);
  EXPECT_EQ(th.count(), 5);
  th.bias = 0.0;
  EXPECT_EQ(th.to_log()[ParamIndex::bias(2)], std::log(HyperParams::kMinBias));
}

TEST(Kernel, ValidateRejectsBadParameters) {
  HyperParams th = HyperParams::isotropic(2, 1.0, 1.0, 0.0, 1.0);
  EXPECT_NO_THROW(th.validate());
  th.bias = -1.0;
  EXPECT_THROW(th.validate(), ContractViolation);
  th = HyperParams::isotropic(2, 1.0, 1.0, 0.0, 1.0);
  th.ard[0] = 0.0;
  EXPECT_THROW(th.validate(), ContractViolation);
  th = HyperParams::isotropic(2, 1.0, 1.0, 0.0, 1.0);
  EXPECT_THROW((void)kernel_matrix(Eigen::MatrixXd::Zero(3, 3), th), ContractViolation);
}

TEST(Kernel, ParameterGradientMatchesDifferences) {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const Eigen::Vector2d a = testing::random_matrix(rng, 2, 1);
    const Eigen::Vector2d b = testing::random_matrix(rng, 2, 1);
    HyperParams th = HyperParams::isotropic(2, rng.uniform(0.5, 2), rng.uniform(0.2, 2), rng.uniform(0.01, 1),
                                            rng.uniform(1, 10));
    const bool same = t % 2 == 0;
    const Eigen::VectorXd g = ard_kernel_gradient(a, b, th, same);
    // Finite differences in linear coordinates.
    Eigen::VectorXd lin(5);
    lin << th.theta0, th.ard[0], th.ard[1], th.bias, th.noise_inv;
    auto f = [&](const Eigen::VectorXd& v) {
      HyperParams p;
      p.theta0 = v[0];
      p.ard = v.segment(1, 2);
      p.bias = v[3];
      p.noise_inv = v[4];
      return ard_kernel(a, b, p, same);
    };
    EXPECT_LE(testing::max_rel_error(g, testing::central_difference(f, lin, 1e-6), 1e-8), 1e-6);
  }
}

TEST(Kernel, MatrixDerivativeMatchesElementwiseGradient) {
  Rng rng(4);
  const Eigen::MatrixXd Z = testing::random_matrix(rng, 6, 2);
  const HyperParams th = HyperParams::isotropic(2, 1.2, 0.9, 0.2, 3.0);
  for (int j = 0; j < th.count(); ++j) {
    const Eigen::MatrixXd dK = kernel_matrix_derivative(Z, th, j);
    for (int r = 0; r < 6; ++r) {
      for (int c = 0; c < 6; ++c) {
        EXPECT_NEAR(dK(r, c), ard_kernel_gradient(Z.row(r).transpose(), Z.row(c).transpose(), th, r == c)[j], 1e-14);
      }
    }
  }
}

TEST(Kernel, RowJacobianMatchesDifferences) {
  Rng rng(6);
  const Eigen::MatrixXd Z = testing::random_matrix(rng, 9, 2);
  const HyperParams th = HyperParams::isotropic(2, 1.2, 0.9, 0.2, 3.0);
  const Eigen::VectorXd z = testing::random_matrix(rng, 2, 1);
  const Eigen::MatrixXd J = kernel_row_jacobian(Z, z, th);
  for (int m = 0; m < 2; ++m) {
    Eigen::VectorXd zp = z;
    Eigen::VectorXd zm = z;
    zp[m] += 1e-6;
    zm[m] -= 1e-6;
    Eigen::VectorXd kp(9);
    Eigen::VectorXd km(9);
    kernel_row(Z, zp, th, kp);
    kernel_row(Z, zm, th, km);
    EXPECT_LE(((kp - km) / 2e-6 - J.col(m)).cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(Kernel, RowMatchesCrossKernel) {
  Rng rng(8);
  const Eigen::MatrixXd Z = testing::random_matrix(rng, 11, 2);
  const HyperParams th = HyperParams::isotropic(2, 1.2, 0.9, 0.2, 3.0);
  const Eigen::VectorXd z = testing::random_matrix(rng, 2, 1);
  Eigen::VectorXd k(11);
  kernel_row(Z, z, th, k);
  const Eigen::MatrixXd C = cross_kernel(Z, z.transpose(), th);
  EXPECT_LE((k - C.col(0)).cwiseAbs().maxCoeff(), 1e-15);
}

}  // namespace
}  // namespace gf
