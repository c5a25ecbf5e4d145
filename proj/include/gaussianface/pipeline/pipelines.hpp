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

#include "gaussianface/cluster/gp_cluster.hpp"
#include "gaussianface/model/train.hpp"
#include "gaussianface/pipeline/pair_io.hpp"

namespace gf {

enum class Similarity { kCosine, kNegEuclidean, kInnerProduct };

[[nodiscard]] const char* similarity_name(Similarity s);
/// Throws ConfigError for an unknown name.
[[nodiscard]] Similarity parse_similarity(const std::string& name);

/// Similarity of two descriptors. Cosine of a zero vector is 0.
[[nodiscard]] double patch_similarity(const Eigen::Ref<const Eigen::VectorXd>& a,
                                      const Eigen::Ref<const Eigen::VectorXd>& b, Similarity kind);

/// s_p = similarity of patch p of face A and patch p of face B.
[[nodiscard]] Eigen::VectorXd similarity_vector(const FacePair& pair, Similarity kind = Similarity::kCosine);

/// [a_p; b_p], or [b_p; a_p] when flipped.
[[nodiscard]] Eigen::VectorXd joint_vector(const FacePair& pair, int p, bool flipped);

/// Labeled similarity vectors of a pair list (pairs with label 0 are skipped).
[[nodiscard]] DomainData bc_domain(const std::vector<FacePair>& pairs, Similarity kind);

/// Joint vectors of every labeled pair and patch, each in both orders.
struct FeTrainingSet {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<int> pair_index;
  std::vector<int> patch_index;
  std::vector<bool> flipped;

  [[nodiscard]] Eigen::Index size() const noexcept { return X.rows(); }
};

[[nodiscard]] FeTrainingSet build_fe_training_set(const std::vector<FacePair>& pairs);
/// Seeded subset of at most max_rows rows; returns the input if it is small enough.
[[nodiscard]] FeTrainingSet subsample(const FeTrainingSet& set, int max_rows, std::uint64_t seed);
[[nodiscard]] DomainData fe_domain(const FeTrainingSet& set);

struct Decision {
  int decision = 0;  ///< +1 same, -1 different
  double probability = 0.0;
};

/// +1 iff probability >= threshold (ties go to "same").
[[nodiscard]] Decision decide(double probability, double threshold);

/// Probability of "same" for an input vector of the model's target domain.
[[nodiscard]] double classify_vector(const Eigen::VectorXd& x, const TrainedModel& model);

struct BcModel {
  TrainedModel model;
  Similarity similarity = Similarity::kCosine;
};

[[nodiscard]] Decision verify_bc(const FacePair& pair, const BcModel& bc, double threshold = 0.5);

struct FeModel {
  TrainedModel model;
  Codebook codebook;
};

/// Clusters the trained model's target latents and builds the codebook.
[[nodiscard]] FeModel build_fe_model(TrainedModel model, const ClusterOptions& opts);

/// Per patch, per codeword: [w (z-c)/S (d), w ((z-c)/S)^2 (d), log-odds ratio, variance ratio].
/// Length P * C * (2d + 2).
[[nodiscard]] Eigen::VectorXd extract_features(const FacePair& pair, const TrainedModel& fe_model,
                                               const Codebook& codebook);
[[nodiscard]] Eigen::VectorXd extract_features(const FacePair& pair, const FeModel& fe);

/// Codebook statistics of one latent query given its prediction.
void codeword_block(const Eigen::VectorXd& z, double p_star, double var_star, const Codebook& codebook,
                    Eigen::Ref<Eigen::VectorXd> out);

/// Per-column standardization fitted on training rows. Columns with
/// (near) zero spread keep scale 1.
struct FeatureScaler {
  Eigen::VectorXd mean;
  Eigen::VectorXd scale;

  static FeatureScaler fit(const Eigen::MatrixXd& X);
  [[nodiscard]] Eigen::VectorXd apply(const Eigen::VectorXd& x) const;
  [[nodiscard]] Eigen::MatrixXd apply_rows(const Eigen::MatrixXd& X) const;
};

/// FE model, the scaler of its training features, and a BC model on the scaled features.
struct CombinedModel {
  FeModel fe;
  FeatureScaler scaler;
  TrainedModel bc;
};

[[nodiscard]] Decision verify_combined(const FacePair& pair, const CombinedModel& model, double threshold = 0.5);

}  // namespace gf
