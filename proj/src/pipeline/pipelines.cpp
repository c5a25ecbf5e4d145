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

#include "gaussianface/pipeline/pipelines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gaussianface/errors.hpp"
#include "gaussianface/random.hpp"

namespace gf {

const char* similarity_name(Similarity s) {
  switch (s) {
    case Similarity::kNegEuclidean: return "neg_euclidean";
    case Similarity::kInnerProduct: return "inner_product";
    case Similarity::kCosine: break;
  }
  return "cosine";
}

Similarity parse_similarity(const std::string& name) {
  if (name == "cosine") return Similarity::kCosine;
  if (name == "neg_euclidean") return Similarity::kNegEuclidean;
  if (name == "inner_product") return Similarity::kInnerProduct;
  throw ConfigError("unknown similarity '" + name + "' (expected cosine, neg_euclidean or inner_product)");
}

double patch_similarity(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b,
                        Similarity kind) {
  require(a.size() == b.size(), "patch_similarity: descriptor sizes differ");
  switch (kind) {
    case Similarity::kNegEuclidean: return -(a - b).norm();
    case Similarity::kInnerProduct: return a.dot(b);
    case Similarity::kCosine: break;
  }
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return a.dot(b) / (na * nb);
}

Eigen::VectorXd similarity_vector(const FacePair& pair, Similarity kind) {
  require(pair.a.rows() == pair.b.rows() && pair.a.cols() == pair.b.cols(), "face pair shapes differ");
  Eigen::VectorXd s(pair.a.rows());
  for (Eigen::Index p = 0; p < s.size(); ++p) {
    s[p] = patch_similarity(pair.a.row(p).transpose(), pair.b.row(p).transpose(), kind);
  }
  return s;
}

Eigen::VectorXd joint_vector(const FacePair& pair, int p, bool flipped) {
  require(p >= 0 && p < pair.patches(), "joint_vector: patch index out of range");
  const auto F = pair.a.cols();
  Eigen::VectorXd v(2 * F);
  const auto& first = flipped ? pair.b : pair.a;
  const auto& second = flipped ? pair.a : pair.b;
  v.head(F) = first.row(p).transpose();
  v.tail(F) = second.row(p).transpose();
  return v;
}

DomainData bc_domain(const std::vector<FacePair>& pairs, Similarity kind) {
  std::vector<const FacePair*> labeled;
  for (const auto& p : pairs) {
    if (p.label != 0) labeled.push_back(&p);
  }
  require(!labeled.empty(), "bc_domain: no labeled pairs");
  DomainData dom;
  dom.X.resize(static_cast<Eigen::Index>(labeled.size()), labeled.front()->patches());
  dom.y.resize(static_cast<Eigen::Index>(labeled.size()));
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    dom.X.row(static_cast<Eigen::Index>(i)) = similarity_vector(*labeled[i], kind).transpose();
    dom.y[static_cast<Eigen::Index>(i)] = labeled[i]->label;
  }
  return dom;
}

FeTrainingSet build_fe_training_set(const std::vector<FacePair>& pairs) {
  FeTrainingSet set;
  Eigen::Index rows = 0;
  for (const auto& p : pairs) {
    if (p.label != 0) rows += 2 * p.patches();
  }
  require(rows > 0, "build_fe_training_set: no labeled pairs");
  const auto F = pairs.front().feature_dim();
  set.X.resize(rows, 2 * F);
  set.y.resize(rows);
  Eigen::Index r = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& pair = pairs[i];
    if (pair.label == 0) continue;
    require(pair.feature_dim() == F, "build_fe_training_set: feature dimensions differ");
    for (int p = 0; p < pair.patches(); ++p) {
      for (bool flip : {false, true}) {
        set.X.row(r) = joint_vector(pair, p, flip).transpose();
        set.y[r] = pair.label;
        set.pair_index.push_back(static_cast<int>(i));
        set.patch_index.push_back(p);
        set.flipped.push_back(flip);
        ++r;
      }
    }
  }
  return set;
}

FeTrainingSet subsample(const FeTrainingSet& set, int max_rows, std::uint64_t seed) {
  require(max_rows >= 2, "subsample: max_rows must be at least 2");
  if (set.size() <= max_rows) return set;
  // Partial Fisher-Yates over row indices, then restore the original order.
  std::vector<Eigen::Index> idx(static_cast<std::size_t>(set.size()));
  std::iota(idx.begin(), idx.end(), Eigen::Index{0});
  Rng rng(seed);
  for (int k = 0; k < max_rows; ++k) {
    const auto j = static_cast<std::size_t>(k) + rng.below(idx.size() - static_cast<std::size_t>(k));
    std::swap(idx[static_cast<std::size_t>(k)], idx[j]);
  }
  idx.resize(static_cast<std::size_t>(max_rows));
  std::sort(idx.begin(), idx.end());
  FeTrainingSet out;
  out.X.resize(max_rows, set.X.cols());
  out.y.resize(max_rows);
  for (int k = 0; k < max_rows; ++k) {
    const auto i = idx[static_cast<std::size_t>(k)];
    out.X.row(k) = set.X.row(i);
    out.y[k] = set.y[i];
    out.pair_index.push_back(set.pair_index[static_cast<std::size_t>(i)]);
    out.patch_index.push_back(set.patch_index[static_cast<std::size_t>(i)]);
    out.flipped.push_back(set.flipped[static_cast<std::size_t>(i)]);
  }
  return out;
}

DomainData fe_domain(const FeTrainingSet& set) {
  DomainData dom;
  dom.X = set.X;
  dom.y = set.y;
  return dom;
}

Decision decide(double probability, double threshold) {
  return {probability >= threshold ? 1 : -1, probability};
}

double classify_vector(const Eigen::VectorXd& x, const TrainedModel& model) {
  const LatentEstimate est = estimate_latent(x, model);
  return model.classifier->predict_prob(est.z);
}

Decision verify_bc(const FacePair& pair, const BcModel& bc, double threshold) {
  return decide(classify_vector(similarity_vector(pair, bc.similarity), bc.model), threshold);
}

FeModel build_fe_model(TrainedModel model, const ClusterOptions& opts) {
  FeModel fe;
  const ClusterResult cr = cluster(model.data.target.Z, *model.classifier, opts);
  fe.codebook = build_codebook(model.data.target.Z, cr.labels, *model.classifier);
  fe.model = std::move(model);
  return fe;
}

void codeword_block(const Eigen::VectorXd& z, double p_star, double var_star, const Codebook& cb,
                    Eigen::Ref<Eigen::VectorXd> out) {
  const int d = cb.dim();
  const int C = cb.size();
  require(z.size() == d, "codeword_block: latent dimension mismatch");
  require(out.size() == C * (2 * d + 2), "codeword_block: output size mismatch");
  const double ps = clamp_prob(p_star);
  Eigen::Index o = 0;
  for (int i = 0; i < C; ++i) {
    const Eigen::ArrayXd u = (z - cb.centers.row(i).transpose()).array() / cb.spreads.row(i).transpose().array();
    out.segment(o, d) = cb.weights[i] * u.matrix();
    out.segment(o + d, d) = cb.weights[i] * u.square().matrix();
    const double pi = cb.probs[i];
    out[o + 2 * d] = std::log(ps * (1.0 - pi) / (pi * (1.0 - ps)));
    out[o + 2 * d + 1] = var_star / cb.variances[i];
    o += 2 * d + 2;
  }
}

Eigen::VectorXd extract_features(const FacePair& pair, const TrainedModel& fe_model, const Codebook& codebook) {
  const int P = pair.patches();
  const int block = codebook.size() * (2 * codebook.dim() + 2);
  Eigen::VectorXd out(static_cast<Eigen::Index>(P) * block);
  for (int p = 0; p < P; ++p) {
    const LatentEstimate est = estimate_latent(joint_vector(pair, p, false), fe_model);
    const auto pred = fe_model.classifier->predict_latent(est.z);
    codeword_block(est.z, squash(pred.mean, pred.variance), pred.variance, codebook,
                   out.segment(static_cast<Eigen::Index>(p) * block, block));
  }
  return out;
}

Eigen::VectorXd extract_features(const FacePair& pair, const FeModel& fe) {
  return extract_features(pair, fe.model, fe.codebook);
}

FeatureScaler FeatureScaler::fit(const Eigen::MatrixXd& X) {
  require(X.rows() >= 1, "FeatureScaler: no rows");
  FeatureScaler s;
  s.mean = X.colwise().mean().transpose();
  s.scale.resize(X.cols());
  for (Eigen::Index c = 0; c < X.cols(); ++c) {
    const double sd = std::sqrt((X.col(c).array() - s.mean[c]).square().mean());
    s.scale[c] = sd > 1e-12 * (1.0 + std::abs(s.mean[c])) ? sd : 1.0;
  }
  return s;
}

Eigen::VectorXd FeatureScaler::apply(const Eigen::VectorXd& x) const {
  require(x.size() == mean.size(), "FeatureScaler: feature length mismatch");
  return (x - mean).cwiseQuotient(scale);
}

Eigen::MatrixXd FeatureScaler::apply_rows(const Eigen::MatrixXd& X) const {
  require(X.cols() == mean.size(), "FeatureScaler: feature length mismatch");
  return (X.rowwise() - mean.transpose()).array().rowwise() / scale.transpose().array();
}

Decision verify_combined(const FacePair& pair, const CombinedModel& model, double threshold) {
  return decide(classify_vector(model.scaler.apply(extract_features(pair, model.fe)), model.bc), threshold);
}

}  // namespace gf
