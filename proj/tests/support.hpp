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

// Shared helpers for the unit and acceptance tests. The oracles here are
// written independently of the library code they check.

#include <cmath>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "gaussianface/random.hpp"

namespace gf::testing {

inline Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * rng.normal();
  }
  return m;
}

/// +-1 labels with both classes present.
inline Eigen::VectorXd random_labels(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = rng.uniform() < 0.5 ? -1.0 : 1.0;
  const auto pos = (y.array() > 0).count();
  if (pos == 0 || pos == n) {
    const auto j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
    y[j] = -y[j];
  }
  return y;
}

inline Eigen::MatrixXd random_spd(Rng& rng, Eigen::Index n, double ridge = 0.1) {
  const Eigen::MatrixXd G = random_matrix(rng, n, n);
  Eigen::MatrixXd K = G * G.transpose() / static_cast<double>(n);
  K.diagonal().array() += ridge;
  return K;
}

inline Eigen::VectorXd central_difference(const std::function<double(const Eigen::VectorXd&)>& f,
                                          const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[j] += h;
    xm[j] -= h;
    g[j] = (f(xp) - f(xm)) / (2.0 * h);
  }
  return g;
}

/// max_j |a_j - b_j| / max(|a_j|, |b_j|, floor)
inline double max_rel_error(const Eigen::VectorXd& a, const Eigen::VectorXd& b, double floor) {
  double worst = 0.0;
  for (Eigen::Index j = 0; j < a.size(); ++j) {
    const double denom = std::max({std::abs(a[j]), std::abs(b[j]), floor});
    worst = std::max(worst, std::abs(a[j] - b[j]) / denom);
  }
  return worst;
}

/// Regularized Fisher ratio max_w (w'm)^2 / w'(Sw + lambda I)w in the feature
/// space given by a Cholesky factor of K (rows are feature vectors).
inline double fisher_ratio_oracle(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, double lambda) {
  const Eigen::Index n = K.rows();
  const Eigen::MatrixXd F = K.llt().matrixL();
  Eigen::RowVectorXd mp = Eigen::RowVectorXd::Zero(n);
  Eigen::RowVectorXd mn = Eigen::RowVectorXd::Zero(n);
  double np = 0;
  double nn = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y[i] > 0) {
      mp += F.row(i);
      np += 1;
    } else {
      mn += F.row(i);
      nn += 1;
    }
  }
  mp /= np;
  mn /= nn;
  Eigen::MatrixXd Sw = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::RowVectorXd c = F.row(i) - (y[i] > 0 ? mp : mn);
    Sw += c.transpose() * c / (y[i] > 0 ? np : nn);
  }
  Sw.diagonal().array() += lambda;
  // Rank-one numerator: the largest generalized eigenvalue is m' Sw^{-1} m.
  const Eigen::VectorXd m = (mp - mn).transpose();
  const Eigen::VectorXd s = Sw.ldlt().solve(m);
  return m.dot(s);
}

/// Pairwise Rand index.
inline double rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  double agree = 0;
  double total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      agree += ((a[i] == a[j]) == (b[i] == b[j])) ? 1 : 0;
      total += 1;
    }
  }
  return total == 0 ? 1.0 : agree / total;
}

/// Gaussian blobs in 2-d around the given centers.
inline Eigen::MatrixXd blobs(Rng& rng, const std::vector<Eigen::Vector2d>& centers, int per_blob, double sd,
                             std::vector<int>* truth) {
  Eigen::MatrixXd Z(static_cast<Eigen::Index>(centers.size()) * per_blob, 2);
  Eigen::Index r = 0;
  for (std::size_t c = 0; c < centers.size(); ++c) {
    for (int i = 0; i < per_blob; ++i, ++r) {
      Z(r, 0) = centers[c].x() + sd * rng.normal();
      Z(r, 1) = centers[c].y() + sd * rng.normal();
      if (truth != nullptr) truth->push_back(static_cast<int>(c));
    }
  }
  return Z;
}

}  // namespace gf::testing
