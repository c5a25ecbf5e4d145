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

#include "gaussianface/model/scg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gaussianface/errors.hpp"

namespace gf {

namespace {

bool all_finite(const Eigen::VectorXd& v) { return v.allFinite(); }

}  // namespace

ScgResult scg_minimize(const ScgObjective& objective, const Eigen::VectorXd& x0, const ScgOptions& opts) {
  require(opts.max_iterations >= 0, "scg: max_iterations must be non-negative");
  const auto p = x0.size();
  constexpr double kSigma0 = 1e-4;
  constexpr double kBetaMin = 1e-15;
  constexpr double kBetaMax = 1e100;

  ScgResult res;
  Eigen::VectorXd x = x0;
  Eigen::VectorXd grad_new(p);
  double f_old = objective(x, &grad_new);
  ++res.evaluations;
  if (!std::isfinite(f_old) || !all_finite(grad_new)) {
    throw NumericalError("scg: objective or gradient is not finite at the starting point");
  }
  res.trace.push_back(f_old);

  Eigen::VectorXd grad_old = grad_new;
  Eigen::VectorXd d = -grad_new;
  Eigen::VectorXd grad_plus(p);
  Eigen::VectorXd x_new(p);
  bool success = true;
  int n_success = 0;
  int rejections = 0;
  double beta = 1.0;
  double mu = 0.0;
  double kappa = 0.0;
  double theta = 0.0;

  if (p == 0 || grad_new.lpNorm<Eigen::Infinity>() <= opts.gradient_tolerance) {
    res.x = x;
    res.f = f_old;
    res.converged = true;
    return res;
  }

  for (int it = 1; it <= opts.max_iterations; ++it) {
    res.iterations = it;
    if (success) {
      mu = d.dot(grad_new);
      if (mu >= 0.0) {
        d = -grad_new;
        mu = d.dot(grad_new);
      }
      kappa = d.squaredNorm();
      if (kappa < std::numeric_limits<double>::epsilon()) {
        res.converged = true;
        break;
      }
      const double sigma = kSigma0 / std::sqrt(kappa);
      objective(x + sigma * d, &grad_plus);
      ++res.evaluations;
      theta = all_finite(grad_plus) ? d.dot(grad_plus - grad_new) / sigma : 0.0;
    }

    // Scale the curvature estimate to keep the local model positive definite.
    double delta = theta + beta * kappa;
    if (delta <= 0.0) {
      delta = beta * kappa;
      beta = beta - theta / kappa;
    }
    const double alpha = -mu / delta;
    x_new = x + alpha * d;
    const double f_new = objective(x_new, nullptr);
    ++res.evaluations;
    const double comparison = std::isfinite(f_new) ? 2.0 * (f_new - f_old) / (alpha * mu) : -1.0;

    if (comparison >= 0.0) {
      success = true;
      ++n_success;
      rejections = 0;
      const double step = (alpha * d).lpNorm<Eigen::Infinity>();
      const double change = std::abs(f_new - f_old);
      x = x_new;
      res.trace.push_back(f_new);
      const double f_prev = f_old;
      f_old = f_new;
      grad_old = grad_new;
      objective(x, &grad_new);
      ++res.evaluations;
      if (!all_finite(grad_new)) throw NumericalError("scg: gradient is not finite at an accepted point");
      if (change <= opts.f_tolerance * std::abs(f_prev) || step == 0.0 ||
          grad_new.lpNorm<Eigen::Infinity>() <= opts.gradient_tolerance) {
        res.converged = true;
        break;
      }
    } else {
      success = false;
      res.trace.push_back(f_old);
      if (++rejections >= opts.max_rejections) {
        res.x = x;
        res.f = f_old;
        throw OptimizationFailure("scg: too many consecutive rejected steps", grad_new.norm());
      }
    }

    if (comparison < 0.25) beta = std::min(4.0 * beta, kBetaMax);
    if (comparison > 0.75) beta = std::max(0.5 * beta, kBetaMin);

    if (n_success == p) {
      d = -grad_new;
      n_success = 0;
    } else if (success) {
      const double gamma = (grad_old - grad_new).dot(grad_new) / mu;
      d = gamma * d - grad_new;
    }
  }
  res.x = x;
  res.f = f_old;
  return res;
}

}  // namespace gf
