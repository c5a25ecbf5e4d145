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

#include "gaussianface/core/anchors.hpp"

#include <limits>
#include <vector>

#include "gaussianface/errors.hpp"
#include "gaussianface/random.hpp"

namespace gf {

Eigen::MatrixXd kmeans_anchors(const Eigen::MatrixXd& Z, int q, std::uint64_t seed, int max_iterations) {
  const auto n = Z.rows();
  const auto d = Z.cols();
  if (q < 1 || q > n) {
    throw ContractViolation("kmeans_anchors: need 1 <= q <= n (q=" + std::to_string(q) +
                            ", n=" + std::to_string(n) + ")");
  }
  Rng rng(seed);

  // k-means++ seeding.
  Eigen::MatrixXd centers(q, d);
  std::vector<char> taken(static_cast<std::size_t>(n), 0);
  Eigen::VectorXd best_sq = Eigen::VectorXd::Constant(n, std::numeric_limits<double>::infinity());
  auto first = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(n)));
  centers.row(0) = Z.row(first);
  taken[static_cast<std::size_t>(first)] = 1;
  for (int c = 1; c < q; ++c) {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dist = (Z.row(i) - centers.row(c - 1)).squaredNorm();
      best_sq[i] = std::min(best_sq[i], dist);
      if (!taken[static_cast<std::size_t>(i)]) total += best_sq[i];
    }
    Eigen::Index pick = -1;
    if (total > 0.0) {
      double target = rng.uniform() * total;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (taken[static_cast<std::size_t>(i)] || best_sq[i] <= 0.0) continue;
        pick = i;
        target -= best_sq[i];
        if (target < 0.0) break;
      }
    }
    if (pick < 0) {
      // Every remaining point coincides with a center; take the next untaken row.
      for (Eigen::Index i = 0; i < n && pick < 0; ++i) {
        if (!taken[static_cast<std::size_t>(i)]) pick = i;
      }
    }
    centers.row(c) = Z.row(pick);
    taken[static_cast<std::size_t>(pick)] = 1;
  }

  // Lloyd iterations.
  std::vector<int> assign(static_cast<std::size_t>(n), -1);
  for (int it = 0; it < max_iterations; ++it) {
    bool changed = false;
    for (Eigen::Index i = 0; i < n; ++i) {
      int best = 0;
      double best_dist = std::numeric_limits<double>::infinity();
      for (int c = 0; c < q; ++c) {
        const double dist = (Z.row(i) - centers.row(c)).squaredNorm();
        if (dist < best_dist) {
          best_dist = dist;
          best = c;
        }
      }
      if (assign[static_cast<std::size_t>(i)] != best) {
        assign[static_cast<std::size_t>(i)] = best;
        changed = true;
      }
    }
    if (!changed) break;
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(q, d);
    Eigen::VectorXi counts = Eigen::VectorXi::Zero(q);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.row(assign[static_cast<std::size_t>(i)]) += Z.row(i);
      ++counts[assign[static_cast<std::size_t>(i)]];
    }
    for (int c = 0; c < q; ++c) {
      if (counts[c] > 0) {
        centers.row(c) = sums.row(c) / counts[c];
        continue;
      }
      // Empty cluster: move it to the point farthest from its current center.
      Eigen::Index far = 0;
      double far_dist = -1.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double dist = (Z.row(i) - centers.row(assign[static_cast<std::size_t>(i)])).squaredNorm();
        if (dist > far_dist) {
          far_dist = dist;
          far = i;
        }
      }
      centers.row(c) = Z.row(far);
    }
  }
  return centers;
}

AnchorApprox anchor_approx(const Eigen::MatrixXd& Z, const Eigen::MatrixXd& anchors, const HyperParams& theta) {
  require(anchors.rows() >= 1 && anchors.rows() <= Z.rows(), "anchor_approx: need 1 <= q <= n");
  AnchorApprox out;
  out.anchors = anchors;
  out.Knq = cross_kernel(Z, anchors, theta);
  Eigen::MatrixXd Kqq = cross_kernel(anchors, anchors, theta);
  const double scale = theta.theta0 + theta.bias;
  Eigen::LLT<Eigen::MatrixXd> llt;
  for (double rel = 1e-12; rel <= 1e-4; rel *= 10.0) {
    Eigen::MatrixXd shifted = Kqq;
    shifted.diagonal().array() += rel * scale;
    llt.compute(shifted);
    if (llt.info() == Eigen::Success) {
      out.anchor_jitter = rel * scale;
      break;
    }
  }
  if (llt.info() != Eigen::Success) throw NumericalError("anchor kernel matrix is not positive definite");
  // Q = Knq L^{-T}
  out.Q = llt.matrixL().solve(out.Knq.transpose()).transpose();
  out.B = llt.solve(out.Knq.transpose());
  return out;
}

}  // namespace gf
