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

#include "gaussianface/cluster/gp_cluster.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gaussianface/errors.hpp"

namespace gf {

namespace {

class DisjointSets {
 public:
  explicit DisjointSets(int n) : parent_(static_cast<std::size_t>(n)) {
    std::iota(parent_.begin(), parent_.end(), 0);
  }
  int find(int x) {
    while (parent_[static_cast<std::size_t>(x)] != x) {
      auto& p = parent_[static_cast<std::size_t>(x)];
      p = parent_[static_cast<std::size_t>(p)];
      x = p;
    }
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[static_cast<std::size_t>(std::max(a, b))] = std::min(a, b);
  }

 private:
  std::vector<int> parent_;
};

double diameter(const Eigen::MatrixXd& Z) {
  if (Z.rows() == 0) return 0.0;
  const Eigen::RowVectorXd lo = Z.colwise().minCoeff();
  const Eigen::RowVectorXd hi = Z.colwise().maxCoeff();
  return (hi - lo).norm();
}

}  // namespace

void ClusterOptions::validate() const {
  require(step > 0.0, "cluster: step must be positive");
  require(flow_tol > 0.0, "cluster: flow_tol must be positive");
  require(segment_samples >= 2, "cluster: segment_samples must be at least 2");
  require(max_iterations >= 1, "cluster: max_iterations must be positive");
}

double variance_field(const Eigen::VectorXd& z, const GpClassifier& model) { return model.variance(z); }

Eigen::VectorXd variance_gradient(const Eigen::VectorXd& z, const GpClassifier& model) {
  return model.variance_gradient(z);
}

FlowResult flow_to_equilibrium(const Eigen::VectorXd& z0, const GpClassifier& model, const ClusterOptions& opts) {
  opts.validate();
  FlowResult r;
  r.z = z0;
  r.variance = model.variance(r.z);
  r.variance_trace.push_back(r.variance);
  double h = opts.step;
  const double h_max = opts.step * 1e6;
  Eigen::VectorXd g = model.variance_gradient(r.z);
  for (int it = 0; it < opts.max_iterations; ++it) {
    r.iterations = it;
    if (g.norm() <= opts.flow_tol) {
      r.converged = true;
      return r;
    }
    const Eigen::VectorXd z_new = r.z - h * g;
    const double v_new = model.variance(z_new);
    if (v_new > r.variance || !std::isfinite(v_new)) {
      h *= 0.5;
      if (h * g.norm() <= 1e-15 * (1.0 + r.z.norm())) return r;  // stalled
      continue;
    }
    r.z = z_new;
    r.variance = v_new;
    r.variance_trace.push_back(v_new);
    g = model.variance_gradient(r.z);
    h = std::min(2.0 * h, h_max);
  }
  r.iterations = opts.max_iterations;
  r.converged = g.norm() <= opts.flow_tol;
  return r;
}

ClusterResult cluster(const Eigen::MatrixXd& Z, const GpClassifier& model, const ClusterOptions& opts) {
  opts.validate();
  require(Z.rows() >= 1, "cluster: no points");
  const int n = static_cast<int>(Z.rows());
  const int d = static_cast<int>(Z.cols());
  ClusterResult out;
  out.merge_radius = opts.merge_radius > 0.0 ? opts.merge_radius : 1e-3 * diameter(Z);

  std::vector<Eigen::VectorXd> reps;
  std::vector<double> rep_var;
  std::vector<bool> rep_converged;
  out.equilibrium_of.assign(static_cast<std::size_t>(n), -1);
  out.converged.assign(static_cast<std::size_t>(n), false);
  std::vector<Eigen::VectorXd> ends(static_cast<std::size_t>(n));

  for (int i = 0; i < n; ++i) {
    const FlowResult f = flow_to_equilibrium(Z.row(i).transpose(), model, opts);
    for (std::size_t k = 1; k < f.variance_trace.size(); ++k) {
      if (f.variance_trace[k] > f.variance_trace[k - 1]) out.descent_held = false;
    }
    out.converged[static_cast<std::size_t>(i)] = f.converged;
    ends[static_cast<std::size_t>(i)] = f.z;
    if (!f.converged) continue;
    int found = -1;
    for (std::size_t e = 0; e < reps.size(); ++e) {
      if ((reps[e] - f.z).norm() <= out.merge_radius) {
        found = static_cast<int>(e);
        break;
      }
    }
    if (found < 0) {
      found = static_cast<int>(reps.size());
      reps.push_back(f.z);
      rep_var.push_back(f.variance);
    }
    out.equilibrium_of[static_cast<std::size_t>(i)] = found;
  }

  if (reps.empty()) {
    // No flow converged: fall back to the flow end points as equilibria.
    warn("cluster: no trajectory reached an equilibrium");
    for (int i = 0; i < n; ++i) {
      reps.push_back(ends[static_cast<std::size_t>(i)]);
      rep_var.push_back(model.variance(reps.back()));
      out.equilibrium_of[static_cast<std::size_t>(i)] = i;
    }
  }
  // Non-converged points join the nearest converged equilibrium.
  for (int i = 0; i < n; ++i) {
    auto& eq = out.equilibrium_of[static_cast<std::size_t>(i)];
    if (eq >= 0) continue;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t e = 0; e < reps.size(); ++e) {
      const double dist = (reps[e] - ends[static_cast<std::size_t>(i)]).norm();
      if (dist < best) {
        best = dist;
        eq = static_cast<int>(e);
      }
    }
  }

  const int E = static_cast<int>(reps.size());
  out.variance_threshold = opts.variance_threshold > 0.0
                               ? opts.variance_threshold
                               : 1.05 * *std::max_element(rep_var.begin(), rep_var.end());
  DisjointSets sets(E);
  for (int a = 0; a < E; ++a) {
    for (int b = a + 1; b < E; ++b) {
      if (sets.find(a) == sets.find(b)) continue;
      bool linked = true;
      for (int s = 0; s < opts.segment_samples && linked; ++s) {
        const double t = static_cast<double>(s) / static_cast<double>(opts.segment_samples - 1);
        const Eigen::VectorXd p = (1.0 - t) * reps[static_cast<std::size_t>(a)] + t * reps[static_cast<std::size_t>(b)];
        linked = model.variance(p) <= out.variance_threshold;
      }
      if (linked) sets.unite(a, b);
    }
  }

  out.equilibria.resize(E, d);
  for (int e = 0; e < E; ++e) out.equilibria.row(e) = reps[static_cast<std::size_t>(e)].transpose();

  // Label components in order of first appearance over the input points.
  std::vector<int> comp_label(static_cast<std::size_t>(E), -1);
  int C = 0;
  out.labels.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const int root = sets.find(out.equilibrium_of[static_cast<std::size_t>(i)]);
    auto& lab = comp_label[static_cast<std::size_t>(root)];
    if (lab < 0) lab = C++;
    out.labels[static_cast<std::size_t>(i)] = lab;
  }
  out.centers = Eigen::MatrixXd::Zero(C, d);
  Eigen::VectorXd count = Eigen::VectorXd::Zero(C);
  for (int e = 0; e < E; ++e) {
    const int lab = comp_label[static_cast<std::size_t>(sets.find(e))];
    if (lab < 0) continue;
    out.centers.row(lab) += out.equilibria.row(e);
    count[lab] += 1.0;
  }
  for (int c = 0; c < C; ++c) out.centers.row(c) /= count[c];
  return out;
}

double clamp_prob(double p) noexcept {
  return std::clamp(p, Codebook::kMinProb, 1.0 - Codebook::kMinProb);
}

Codebook build_codebook(const Eigen::MatrixXd& Z, const std::vector<int>& labels, const GpClassifier& model) {
  require(static_cast<Eigen::Index>(labels.size()) == Z.rows() && Z.rows() >= 1,
          "build_codebook: one label per latent point is required");
  const int C = *std::max_element(labels.begin(), labels.end()) + 1;
  require(*std::min_element(labels.begin(), labels.end()) >= 0, "build_codebook: labels must be non-negative");
  const auto d = Z.cols();
  const auto n = Z.rows();
  Codebook cb;
  cb.centers = Eigen::MatrixXd::Zero(C, d);
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(C, d);
  Eigen::VectorXd count = Eigen::VectorXd::Zero(C);
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = labels[static_cast<std::size_t>(i)];
    cb.centers.row(c) += Z.row(i);
    count[c] += 1.0;
  }
  for (int c = 0; c < C; ++c) {
    require(count[c] > 0.0, "build_codebook: labels must be contiguous from 0");
    cb.centers.row(c) /= count[c];
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = labels[static_cast<std::size_t>(i)];
    sq.row(c) += (Z.row(i) - cb.centers.row(c)).array().square().matrix();
  }
  cb.spreads.resize(C, d);
  for (int c = 0; c < C; ++c) {
    cb.spreads.row(c) = (sq.row(c) / count[c]).array().sqrt().max(Codebook::kMinSpread).matrix();
  }
  cb.weights = count / static_cast<double>(n);
  cb.probs.resize(C);
  cb.variances.resize(C);
  for (int c = 0; c < C; ++c) {
    const auto pred = model.predict_latent(cb.centers.row(c).transpose());
    cb.probs[c] = clamp_prob(squash(pred.mean, pred.variance));
    cb.variances[c] = std::max(pred.variance, Codebook::kMinVariance);
  }
  return cb;
}

}  // namespace gf
