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

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gaussianface/model/objective.hpp"

namespace gf {

struct CheckResult {
  std::string name;
  bool passed = false;
  double max_error = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

struct CheckReport {
  std::vector<CheckResult> results;

  [[nodiscard]] bool all_passed() const;
  void add(CheckResult r) { results.push_back(std::move(r)); }
};

/// Small seeded objective instance with d = 2 latents.
struct GradInstance {
  ModelData data;
  HyperParams theta;
  ObjectiveConfig cfg;
};

/// N in [6, max_rows] per domain, random X, Z and theta; `base` supplies the
/// prior and anchor settings, beta and S are set as given.
[[nodiscard]] GradInstance make_grad_instance(std::uint64_t seed, int sources, double beta,
                                              const ObjectiveConfig& base, int max_rows = 20);

/// max_j |a_j - n_j| / max(|a_j|, |n_j|, floor).
[[nodiscard]] double gradient_relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric,
                                             double floor);

/// Central differences of L in log theta, step h.
[[nodiscard]] Eigen::VectorXd numeric_theta_gradient(const GradInstance& inst, double h);

struct GradcheckOptions {
  int instances = 20;
  double tolerance = 1e-4;
  double step = 1e-5;
  std::uint64_t seed = 1;
};

/// Objective theta and latent gradients (dense and anchor paths) and the
/// Laplace evidence gradient against central differences.
[[nodiscard]] CheckReport run_gradcheck(const ObjectiveConfig& base, const GradcheckOptions& opts = {});

/// Largest generalized eigenvalue of (m m^T, S_w + lambda I) in the feature
/// space of K = V diag(e) V^T, i.e. the optimum of the regularized Fisher ratio.
[[nodiscard]] double kfda_eigen_oracle(const Eigen::MatrixXd& K, const Eigen::VectorXd& labels, double lambda);

/// Pairwise Rand index between two labelings.
[[nodiscard]] double rand_index(const std::vector<int>& a, const std::vector<int>& b);

/// Three well-separated Gaussian blobs in 2-d with labels +1, -1, +1 and a
/// kernel matched to their scale.
struct ThreeBlobs {
  Eigen::MatrixXd Z;
  Eigen::VectorXd y;
  std::vector<int> truth;
  HyperParams theta;
};
[[nodiscard]] ThreeBlobs make_three_blobs(std::uint64_t seed, int per_blob);

/// Woodbury operators, KFDA against its eigen oracle and the identity kernel,
/// Laplace stationarity, and clustering of three separated blobs.
[[nodiscard]] CheckReport run_selfcheck(std::uint64_t seed = 1);

}  // namespace gf
