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

#include <boost/math/distributions/normal.hpp>

#include "gaussianface/core/kernel.hpp"
#include "gaussianface/errors.hpp"
#include "gaussianface/gp/laplace.hpp"
#include "gaussianface/gp/predictor.hpp"
#include "gaussianface/gp/probit.hpp"
#include "support.hpp"

namespace gf {
namespace {

const boost::math::normal kStd;

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }
double Phi(double x) { return boost::math::cdf(kStd, x); }

struct Instance {
  Eigen::MatrixXd Z;
  Eigen::VectorXd y;
  HyperParams theta;
  Eigen::MatrixXd K;
};

Instance random_instance(Rng& rng, int n) {
  Instance in;
  in.Z = testing::random_matrix(rng, n, 2);
  in.y = testing::random_labels(rng, n);
  in.theta = HyperParams::isotropic(2, rng.uniform(0.5, 3.0), rng.uniform(0.2, 2.0), 0.05, rng.uniform(2.0, 50.0));
  in.K = kernel_matrix(in.Z, in.theta);
  in.K.diagonal().array() += kernel_jitter(in.theta);
  return in;
}

// Gradient of log p(y|f) - 1/2 f'K^-1 f, computed from scratch.
double stationarity_oracle(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, const Eigen::VectorXd& f) {
  Eigen::VectorXd g(f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i) g[i] = y[i] * phi(y[i] * f[i]) / Phi(y[i] * f[i]);
  return (g - K.ldlt().solve(f)).cwiseAbs().maxCoeff();
}

TEST(Laplace, ModeIsStationary) {
  Rng rng(1);
  for (int t = 0; t < 50; ++t) {
    const Instance in = random_instance(rng, 2 + static_cast<int>(rng.below(40)));
    const LaplaceResult r = laplace_mode(in.K, in.y);
    EXPECT_LE(r.stationarity, 1e-8);
    EXPECT_LE(stationarity_oracle(in.K, in.y, r.f_hat), 1e-7) << "t=" << t;
    EXPECT_GE(r.W.minCoeff(), 0.0);
  }
}

TEST(Laplace, ScalarModeMatchesBisection) {
  double lo = 0.0, hi = 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid - phi(mid) / Phi(mid) > 0 ? hi : lo) = mid;
  }
  const LaplaceResult r = laplace_mode(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Ones(1));
  EXPECT_NEAR(r.f_hat[0], 0.5 * (lo + hi), 1e-9);
}

TEST(Laplace, ScalarEvidenceMatchesIndependentFormula) {
  double lo = 0.0, hi = 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid - phi(mid) / Phi(mid) > 0 ? hi : lo) = mid;
  }
  const double f = 0.5 * (lo + hi);
  const double r = phi(f) / Phi(f);
  const double W = r * r + f * r;  // -d^2/df^2 log Phi(f)
  const double expect = -0.5 * f * f + std::log(Phi(f)) - 0.5 * std::log1p(W);
  const double got = log_marginal_laplace(Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Ones(1));
  EXPECT_NEAR(got, expect, 1e-9);
  // Quadrature of the exact evidence: int Phi(f) N(f; 0, 1) df = 1/2.
  double q = 0.0;
  const double h = 1e-3;
  for (double x = -12.0; x <= 12.0; x += h) q += Phi(x) * phi(x) * h;
  EXPECT_NEAR(q, 0.5, 1e-6);
  EXPECT_NEAR(got, std::log(q), 0.05);
  EXPECT_DOUBLE_EQ(got, log_marginal_laplace(Eigen::MatrixXd::Ones(1, 1), -Eigen::VectorXd::Ones(1)));
}

TEST(Laplace, SignEquivariance) {
  Rng rng(2);
  for (int t = 0; t < 20; ++t) {
    const Instance in = random_instance(rng, 3 + static_cast<int>(rng.below(20)));
    const LaplaceResult a = laplace_mode(in.K, in.y);
    const LaplaceResult b = laplace_mode(in.K, -in.y);
    EXPECT_LE((a.f_hat + b.f_hat).cwiseAbs().maxCoeff(), 1e-8);
    EXPECT_NEAR(a.log_marginal, b.log_marginal, 1e-8);
  }
}

TEST(Laplace, PredictionsSymmetricAndInRange) {
  Rng rng(3);
  const Instance in = random_instance(rng, 25);
  const GpClassifier pos = GpClassifier::fit(in.Z, in.y, in.theta);
  const GpClassifier neg = GpClassifier::fit(in.Z, -in.y, in.theta);
  for (int q = 0; q < 1000; ++q) {
    const Eigen::Vector2d z(rng.uniform(-4, 4), rng.uniform(-4, 4));
    const double p = pos.predict_prob(z);
    EXPECT_GE(p, 0.0);
    EXPECT_LE(p, 1.0);
    EXPECT_NEAR(neg.predict_prob(z), 1.0 - p, 1e-8);
  }
}

// Posterior mean of f_* under the exact posterior p(f|y) with prior samples
// weighted by the likelihood.
double monte_carlo_mean(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, const Eigen::VectorXd& k_star,
                        std::uint64_t seed, int samples) {
  const Eigen::MatrixXd L = K.llt().matrixL();
  const Eigen::VectorXd w = K.llt().solve(k_star);
  Rng rng(seed);
  Eigen::VectorXd e(K.rows());
  double num = 0.0, den = 0.0;
  for (int s = 0; s < samples; ++s) {
    for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = rng.normal();
    const Eigen::VectorXd f = L * e;
    double weight = 1.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) weight *= Phi(y[i] * f[i]);
    num += weight * w.dot(f);
    den += weight;
  }
  return num / den;
}

TEST(Laplace, SmallProblemsAgreeWithMonteCarlo) {
  Rng rng(4);
  for (int n = 1; n <= 3; ++n) {
    for (int t = 0; t < 3; ++t) {
      Instance in;
      in.Z = testing::random_matrix(rng, n, 2, 0.7);
      in.y = n == 1 ? Eigen::VectorXd::Ones(1) : testing::random_labels(rng, n);
      in.theta = HyperParams::isotropic(2, 0.5, 0.5, 0.0, 20.0);
      in.K = kernel_matrix(in.Z, in.theta);
      in.K.diagonal().array() += kernel_jitter(in.theta);
      const GpClassifier clf = GpClassifier::fit(in.Z, in.y, in.theta);
      const Eigen::Vector2d z = in.Z.row(0).transpose() + Eigen::Vector2d(0.2, -0.1);
      const double laplace = clf.predict_latent(z).mean;
      const Eigen::VectorXd k_star = cross_kernel(in.Z, z.transpose(), in.theta);
      const double mc = monte_carlo_mean(in.K, in.y, k_star, 1234, 1000000);
      EXPECT_LE(std::abs(laplace - mc), 0.1 * std::abs(mc)) << "n=" << n << " t=" << t;
    }
  }
}

TEST(Laplace, RestartFromAlphaIsBitwise) {
  Rng rng(5);
  const Instance in = random_instance(rng, 15);
  const LaplaceResult a = laplace_mode(in.K, in.y);
  const LaplaceResult b = laplace_from_alpha(in.K, in.y, a.alpha, a.iterations);
  EXPECT_TRUE(a.f_hat == b.f_hat);
  EXPECT_TRUE(a.W == b.W);
  EXPECT_EQ(a.log_marginal, b.log_marginal);
}

TEST(Laplace, EvidenceGradientMatchesDifferences) {
  Rng rng(6);
  for (int t = 0; t < 10; ++t) {
    const Instance in = random_instance(rng, 4 + static_cast<int>(rng.below(12)));
    const Eigen::VectorXd lt = in.theta.to_log();
    auto K_of = [&](const Eigen::VectorXd& l) {
      const HyperParams th = HyperParams::from_log(l);
      Eigen::MatrixXd K = kernel_matrix(in.Z, th);
      K.diagonal().array() += 1e-8;
      return K;
    };
    std::vector<Eigen::MatrixXd> dK;
    // kernel_matrix_derivative is in linear coordinates; scale to log coordinates.
    for (int j = 0; j < in.theta.count(); ++j)
      dK.push_back(std::exp(lt[j]) * kernel_matrix_derivative(in.Z, in.theta, j));
    LaplaceOptions tight;
    tight.gradient_tolerance = 1e-12;
    const Eigen::VectorXd g = log_marginal_laplace_gradient(K_of(lt), in.y, dK, tight);
    const Eigen::VectorXd n = testing::central_difference(
        [&](const Eigen::VectorXd& l) { return log_marginal_laplace(K_of(l), in.y, tight); }, lt, 1e-5);
    EXPECT_LE(testing::max_rel_error(g, n, 1e-6), 1e-4) << "t=" << t;
  }
}

TEST(Laplace, NonConvergenceThrows) {
  Rng rng(7);
  const Instance in = random_instance(rng, 30);
  LaplaceOptions opts;
  opts.max_iterations = 1;
  try {
    (void)laplace_mode(in.K * 100.0, in.y, opts);
    FAIL() << "expected OptimizationFailure";
  } catch (const OptimizationFailure& e) {
    EXPECT_GT(e.last_gradient_norm(), 1e-8);
  }
}

TEST(Laplace, InvalidLabelsRejected) {
  Eigen::VectorXd y(2);
  y << 1, 0.5;
  EXPECT_THROW((void)laplace_mode(Eigen::MatrixXd::Identity(2, 2), y), ContractViolation);
}

TEST(Probit, SquashValues) {
  EXPECT_EQ(squash(0.0, 3.0), 0.5);
  EXPECT_NEAR(squash(1.96, 0.0), 0.9750021048517795, 1e-12);
  EXPECT_NEAR(squash(1.0, 1e12), 0.5, 1e-6);
  double prev = 0.0;
  for (double m = -5.0; m <= 5.0; m += 0.25) {
    const double p = squash(m, 0.7);
    EXPECT_GT(p, prev);
    prev = p;
  }
}

TEST(Probit, LikelihoodDerivativesMatchDifferences) {
  for (double f : {-30.0, -12.0, -9.0, -2.0, 0.0, 0.3, 4.0, 11.0, 25.0}) {
    for (double y : {-1.0, 1.0}) {
      const auto d = probit::log_likelihood(y, f);
      const double h = 1e-5 * std::max(1.0, std::abs(f));
      const auto p = probit::log_likelihood(y, f + h);
      const auto m = probit::log_likelihood(y, f - h);
      EXPECT_NEAR(d.d1, (p.log_lik - m.log_lik) / (2 * h), 1e-6 * std::max(1.0, std::abs(d.d1)));
      EXPECT_NEAR(d.d2, (p.d1 - m.d1) / (2 * h), 1e-6 * std::max(1.0, std::abs(d.d2)));
      EXPECT_NEAR(d.d3, (p.d2 - m.d2) / (2 * h), 1e-5 * std::max(1.0, std::abs(d.d3)));
    }
  }
}

}  // namespace
}  // namespace gf
