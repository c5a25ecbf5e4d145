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

#include "gaussianface/gp/laplace.hpp"

#include <cmath>
#include <limits>

#include "gaussianface/errors.hpp"
#include "gaussianface/gp/probit.hpp"

namespace gf {

void validate_labels(const Eigen::VectorXd& y) {
  require(y.size() >= 1, "label vector is empty");
  for (Eigen::Index i = 0; i < y.size(); ++i) require(y[i] == 1.0 || y[i] == -1.0, "labels must be +1 or -1");
}

namespace {

struct LikTerms {
  double log_lik = 0.0;
  Eigen::VectorXd d1, W, d3;
};

LikTerms likelihood(const Eigen::VectorXd& y, const Eigen::VectorXd& f) {
  LikTerms t;
  const auto n = y.size();
  t.d1.resize(n);
  t.W.resize(n);
  t.d3.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto d = probit::log_likelihood(y[i], f[i]);
    t.log_lik += d.log_lik;
    t.d1[i] = d.d1;
    t.W[i] = std::max(0.0, -d.d2);
    t.d3[i] = d.d3;
  }
  return t;
}

Eigen::LLT<Eigen::MatrixXd> factor_B(const Eigen::MatrixXd& K, const Eigen::VectorXd& sW) {
  Eigen::MatrixXd B = sW.asDiagonal() * K * sW.asDiagonal();
  B.diagonal().array() += 1.0;
  Eigen::LLT<Eigen::MatrixXd> llt(B);
  if (llt.info() != Eigen::Success) throw NumericalError("Laplace: I + W^1/2 K W^1/2 is not positive definite");
  return llt;
}

LaplaceResult finish(const Eigen::MatrixXd& K, Eigen::VectorXd alpha, Eigen::VectorXd f, const LikTerms& lik,
                     int iterations) {
  LaplaceResult out;
  out.iterations = iterations;
  out.stationarity = (lik.d1 - alpha).lpNorm<Eigen::Infinity>();
  out.W = lik.W;
  out.grad_lik = lik.d1;
  const Eigen::VectorXd sW = lik.W.array().sqrt();
  out.B_llt = factor_B(K, sW);
  const double half_logdet_B = out.B_llt.matrixLLT().diagonal().array().log().sum();
  out.log_marginal = -0.5 * alpha.dot(f) + lik.log_lik - half_logdet_B;
  out.alpha = std::move(alpha);
  out.f_hat = std::move(f);
  return out;
}

}  // namespace

LaplaceResult laplace_mode(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, const LaplaceOptions& opts) {
  validate_labels(y);
  require(K.rows() == y.size() && K.cols() == y.size(), "laplace_mode: kernel size does not match labels");
  const auto n = y.size();

  Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd f = Eigen::VectorXd::Zero(n);
  LikTerms lik = likelihood(y, f);
  double psi = lik.log_lik;
  double grad_norm = (lik.d1 - alpha).lpNorm<Eigen::Infinity>();
  int it = 0;

  while (grad_norm > opts.gradient_tolerance) {
    if (it >= opts.max_iterations) {
      throw OptimizationFailure("Laplace mode search did not converge", grad_norm);
    }
    ++it;
    const Eigen::VectorXd sW = lik.W.array().sqrt();
    const auto llt = factor_B(K, sW);
    const Eigen::VectorXd b = lik.W.cwiseProduct(f) + lik.d1;
    const Eigen::VectorXd v = llt.solve(sW.cwiseProduct(K * b));
    const Eigen::VectorXd alpha_newton = b - sW.cwiseProduct(v);
    const Eigen::VectorXd step = alpha_newton - alpha;

    double t = 1.0;
    bool accepted = false;
    Eigen::VectorXd alpha_try, f_try;
    LikTerms lik_try;
    double psi_try = -std::numeric_limits<double>::infinity();
    for (int h = 0; h <= opts.max_halvings; ++h) {
      alpha_try = alpha + t * step;
      f_try = K * alpha_try;
      lik_try = likelihood(y, f_try);
      psi_try = lik_try.log_lik - 0.5 * alpha_try.dot(f_try);
      // Accept ties at round-off level so the last Newton steps are not rejected.
      if (psi_try >= psi - 1e-14 * (1.0 + std::abs(psi))) {
        accepted = true;
        break;
      }
      t *= 0.5;
    }
    if (!accepted) throw OptimizationFailure("Laplace mode search: no ascent step found", grad_norm);
    alpha = std::move(alpha_try);
    f = std::move(f_try);
    lik = std::move(lik_try);
    psi = psi_try;
    grad_norm = (lik.d1 - alpha).lpNorm<Eigen::Infinity>();
  }

  return finish(K, std::move(alpha), std::move(f), lik, it);
}

LaplaceResult laplace_from_alpha(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, const Eigen::VectorXd& alpha,
                                 int iterations) {
  validate_labels(y);
  require(K.rows() == y.size() && K.cols() == y.size() && alpha.size() == y.size(),
          "laplace_from_alpha: size mismatch");
  Eigen::VectorXd f = K * alpha;
  const LikTerms lik = likelihood(y, f);
  return finish(K, alpha, std::move(f), lik, iterations);
}

double log_marginal_laplace(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, const LaplaceOptions& opts) {
  return laplace_mode(K, y, opts).log_marginal;
}

Eigen::VectorXd log_marginal_laplace_gradient(const Eigen::MatrixXd& K, const Eigen::VectorXd& y,
                                              const std::vector<Eigen::MatrixXd>& dK,
                                              const LaplaceOptions& opts) {
  const LaplaceResult res = laplace_mode(K, y, opts);
  const auto n = y.size();
  const LikTerms lik = likelihood(y, res.f_hat);
  const Eigen::VectorXd sW = res.W.array().sqrt();
  // R = W^1/2 B^{-1} W^1/2, C = L^{-1} W^1/2 K
  const Eigen::MatrixXd R = sW.asDiagonal() * res.B_llt.solve(Eigen::MatrixXd(sW.asDiagonal()));
  const Eigen::MatrixXd C = res.B_llt.matrixL().solve(sW.asDiagonal() * K);
  // d(-1/2 log|B|)/df_i = 1/2 [(K^-1 + W)^-1]_ii d3_i, since dW/df = -d3.
  const Eigen::VectorXd s2 =
      0.5 * (K.diagonal() - C.colwise().squaredNorm().transpose()).cwiseProduct(lik.d3);
  Eigen::VectorXd grad(static_cast<Eigen::Index>(dK.size()));
  for (std::size_t j = 0; j < dK.size(); ++j) {
    const Eigen::MatrixXd& Cj = dK[j];
    require(Cj.rows() == n && Cj.cols() == n, "log_marginal_laplace_gradient: derivative size mismatch");
    const double s1 = 0.5 * res.alpha.dot(Cj * res.alpha) - 0.5 * R.cwiseProduct(Cj).sum();
    const Eigen::VectorXd b = Cj * lik.d1;
    const Eigen::VectorXd s3 = b - K * (R * b);
    grad[static_cast<Eigen::Index>(j)] = s1 + s2.dot(s3);
  }
  return grad;
}

}  // namespace gf
