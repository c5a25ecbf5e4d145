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
#include <sstream>

#include "gaussianface/errors.hpp"
#include "gaussianface/pipeline/pair_io.hpp"
#include "gaussianface/pipeline/patches.hpp"
#include "gaussianface/pipeline/pipelines.hpp"
#include "support.hpp"

namespace gf {
namespace {

// Matched pairs share an identity vector per patch; mismatched pairs do not.
std::vector<FacePair> toy_pairs(std::uint64_t seed, int n, int P, int F, double noise = 0.2) {
  Rng rng(seed);
  std::vector<FacePair> out;
  for (int i = 0; i < n; ++i) {
    FacePair p;
    p.label = i % 2 == 0 ? 1 : -1;
    p.id_a = 2 * i;
    p.id_b = p.label == 1 ? 2 * i : 2 * i + 1;
    p.a = testing::random_matrix(rng, P, F);
    p.b = p.label == 1 ? Eigen::MatrixXd(p.a + noise * testing::random_matrix(rng, P, F))
                       : testing::random_matrix(rng, P, F);
    out.push_back(std::move(p));
  }
  return out;
}

TEST(PatchGrid, Counts) {
  EXPECT_EQ(patch_grid(150, 120, 25, 2).count(), 63 * 48);
  EXPECT_EQ(patch_grid(25, 25, 25, 1).count(), 1);
  EXPECT_EQ(patch_grid(100, 75, 25, 25).count(), 4 * 3);
  const PatchGrid g = patch_grid(30, 30, 10, 10);
  EXPECT_EQ(g.positions.back(), std::make_pair(20, 20));
  EXPECT_THROW((void)patch_grid(20, 30, 25, 1), ContractViolation);
  EXPECT_THROW((void)patch_grid(30, 30, 10, 0), ContractViolation);
}

TEST(Similarity, CosineCases) {
  Rng rng(1);
  FacePair same;
  same.a = testing::random_matrix(rng, 5, 4);
  same.b = same.a;
  const Eigen::VectorXd s = similarity_vector(same);
  for (int p = 0; p < 5; ++p) EXPECT_NEAR(s[p], 1.0, 1e-15);

  FacePair ortho;
  ortho.a = Eigen::MatrixXd::Zero(3, 4);
  ortho.b = Eigen::MatrixXd::Zero(3, 4);
  for (int p = 0; p < 3; ++p) {
    ortho.a(p, p) = 1.0 + p;
    ortho.b(p, p + 1) = 2.0;
  }
  EXPECT_EQ(similarity_vector(ortho), Eigen::VectorXd::Zero(3));

  FacePair r;
  r.a = testing::random_matrix(rng, 6, 5);
  r.b = testing::random_matrix(rng, 6, 5);
  const Eigen::VectorXd c = similarity_vector(r);
  for (int p = 0; p < 6; ++p) {
    double dot = 0, na = 0, nb = 0;
    for (int f = 0; f < 5; ++f) {
      dot += r.a(p, f) * r.b(p, f);
      na += r.a(p, f) * r.a(p, f);
      nb += r.b(p, f) * r.b(p, f);
    }
    EXPECT_NEAR(c[p], dot / std::sqrt(na * nb), 1e-14);
    EXPECT_NEAR(similarity_vector(r, Similarity::kInnerProduct)[p], dot, 1e-13);
    EXPECT_NEAR(similarity_vector(r, Similarity::kNegEuclidean)[p], -(r.a.row(p) - r.b.row(p)).norm(), 1e-13);
  }
  EXPECT_TRUE(similarity_vector(r) == similarity_vector(r.swapped()));
}

TEST(Similarity, Names) {
  for (Similarity s : {Similarity::kCosine, Similarity::kNegEuclidean, Similarity::kInnerProduct})
    EXPECT_EQ(parse_similarity(similarity_name(s)), s);
  EXPECT_THROW((void)parse_similarity("manhattan"), ConfigError);
}

TEST(JointVector, LayoutAndFlip) {
  const std::vector<FacePair> pairs = toy_pairs(2, 1, 3, 4);
  const FacePair& p = pairs[0];
  const Eigen::VectorXd v = joint_vector(p, 1, false);
  EXPECT_TRUE(v.head(4) == p.a.row(1).transpose());
  EXPECT_TRUE(v.tail(4) == p.b.row(1).transpose());
  const Eigen::VectorXd f = joint_vector(p, 1, true);
  EXPECT_TRUE(f.head(4) == v.tail(4));
  EXPECT_TRUE(joint_vector(p.swapped(), 1, true) == v);
  EXPECT_THROW((void)joint_vector(p, 3, false), ContractViolation);
}

TEST(FeTrainingSet, TwoVectorsPerPairPerPatch) {
  const std::vector<FacePair> pairs = toy_pairs(3, 7, 4, 3);
  const FeTrainingSet set = build_fe_training_set(pairs);
  EXPECT_EQ(set.size(), 7 * 4 * 2);
  int flipped = 0;
  for (bool f : set.flipped) flipped += f;
  EXPECT_EQ(flipped, 7 * 4);
  for (Eigen::Index r = 0; r < set.size(); ++r) {
    const auto k = static_cast<std::size_t>(r);
    const FacePair& p = pairs[static_cast<std::size_t>(set.pair_index[k])];
    EXPECT_TRUE(set.X.row(r).transpose() == joint_vector(p, set.patch_index[k], set.flipped[k]));
    EXPECT_EQ(set.y[r], p.label);
  }
  const FeTrainingSet sub = subsample(set, 20, 5);
  EXPECT_EQ(sub.size(), 20);
  EXPECT_TRUE(subsample(set, 20, 5).X == sub.X);
  EXPECT_EQ(subsample(set, 1000, 5).size(), set.size());
}

TEST(Codeword, ZeroOffsetsAtCenter) {
  Codebook cb;
  cb.centers = Eigen::MatrixXd(2, 2);
  cb.centers << 0.5, -1.0, 2.0, 3.0;
  cb.spreads = Eigen::MatrixXd::Constant(2, 2, 0.7);
  cb.weights = Eigen::Vector2d(0.25, 0.75);
  cb.probs = Eigen::Vector2d(0.3, 0.8);
  cb.variances = Eigen::Vector2d(0.4, 1.2);
  Eigen::VectorXd out(2 * 6);
  codeword_block(cb.centers.row(1).transpose(), 0.8, 1.2, cb, out);
  EXPECT_EQ(out.segment(6, 4), Eigen::VectorXd::Zero(4));
  EXPECT_NEAR(out[10], 0.0, 1e-15);
  EXPECT_EQ(out[11], 1.0);
  // Offsets from the other codeword, scaled by its weight.
  const double u0 = (2.0 - 0.5) / 0.7, u1 = (3.0 + 1.0) / 0.7;
  EXPECT_NEAR(out[0], 0.25 * u0, 1e-15);
  EXPECT_NEAR(out[1], 0.25 * u1, 1e-15);
  EXPECT_NEAR(out[2], 0.25 * u0 * u0, 1e-14);
  EXPECT_NEAR(out[4], std::log(0.8 * 0.7 / (0.3 * 0.2)), 1e-14);
  EXPECT_NEAR(out[5], 1.2 / 0.4, 1e-15);
  // Extreme probabilities stay finite.
  codeword_block(cb.centers.row(0).transpose(), 0.0, 1.0, cb, out);
  EXPECT_TRUE(out.allFinite());
  codeword_block(cb.centers.row(0).transpose(), 1.0, 1.0, cb, out);
  EXPECT_TRUE(out.allFinite());
}

TEST(Decision, TieGoesToSame) {
  EXPECT_EQ(decide(0.5, 0.5).decision, 1);
  EXPECT_EQ(decide(0.4999999, 0.5).decision, -1);
  EXPECT_EQ(decide(0.7, 0.5).probability, 0.7);
}

TrainConfig quick_config() {
  TrainConfig cfg;
  cfg.scg.max_iterations = 20;
  cfg.outer_iterations = 3;
  cfg.objective.prior.form = PriorForm::kInverseFisher;
  return cfg;
}

TEST(BcPipeline, SeparablePairsAndSymmetry) {
  const std::vector<FacePair> train_pairs = toy_pairs(4, 60, 6, 8);
  const std::vector<FacePair> test_pairs = toy_pairs(5, 40, 6, 8);
  BcModel bc;
  bc.model = train(ModelData{bc_domain(train_pairs, Similarity::kCosine), {}}, quick_config());
  int correct = 0;
  for (const FacePair& p : test_pairs) {
    const Decision d = verify_bc(p, bc);
    correct += d.decision == p.label;
    const Decision s = verify_bc(p.swapped(), bc);
    EXPECT_EQ(d.probability, s.probability);
  }
  EXPECT_GE(correct, 38);
}

TEST(FePipeline, FeatureLengthAndDeterminism) {
  const std::vector<FacePair> pairs = toy_pairs(6, 12, 3, 4);
  TrainConfig cfg = quick_config();
  cfg.outer_iterations = 1;
  cfg.scg.max_iterations = 5;
  const FeTrainingSet set = build_fe_training_set(pairs);
  const FeModel fe = build_fe_model(train(ModelData{fe_domain(set), {}}, cfg), ClusterOptions{});
  const int C = fe.codebook.size();
  const int d = fe.codebook.dim();
  ASSERT_GE(C, 1);
  for (const FacePair& p : pairs) {
    const Eigen::VectorXd a = extract_features(p, fe);
    EXPECT_EQ(a.size(), 3 * C * (2 * d + 2));
    EXPECT_TRUE(a.allFinite());
    EXPECT_TRUE(a == extract_features(p, fe));
  }
  // A one-word codebook still yields P (2d + 2) features.
  Codebook one = fe.codebook;
  one.centers = fe.codebook.centers.topRows(1);
  one.spreads = fe.codebook.spreads.topRows(1);
  one.weights = Eigen::VectorXd::Ones(1);
  one.probs = fe.codebook.probs.head(1);
  one.variances = fe.codebook.variances.head(1);
  EXPECT_EQ(extract_features(pairs[0], fe.model, one).size(), 3 * (2 * d + 2));
}

TEST(FeatureScaler, StandardizesColumns) {
  Rng rng(7);
  Eigen::MatrixXd X = testing::random_matrix(rng, 50, 3);
  X.col(0) = 1e6 * X.col(0).array() + 5.0;
  X.col(2).setConstant(4.0);
  const FeatureScaler s = FeatureScaler::fit(X);
  const Eigen::MatrixXd Y = s.apply_rows(X);
  EXPECT_NEAR(Y.col(0).mean(), 0.0, 1e-12);
  EXPECT_NEAR(std::sqrt(Y.col(0).array().square().mean()), 1.0, 1e-12);
  EXPECT_EQ(s.scale[2], 1.0);
  EXPECT_TRUE(Y.col(2).isZero());
  EXPECT_TRUE(s.apply(X.row(3).transpose()) == Y.row(3).transpose());
}

TEST(PairIo, RoundTripIsExact) {
  PairSet set;
  set.P = 3;
  set.F = 2;
  set.pairs = toy_pairs(8, 5, 3, 2);
  set.pairs[4].label = 0;
  std::stringstream ss;
  write_pairs(ss, set);
  const PairSet back = read_pairs(ss);
  ASSERT_EQ(back.pairs.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_TRUE(back.pairs[i].a == set.pairs[i].a);
    EXPECT_TRUE(back.pairs[i].b == set.pairs[i].b);
    EXPECT_EQ(back.pairs[i].label, set.pairs[i].label);
    EXPECT_EQ(back.pairs[i].id_b, set.pairs[i].id_b);
  }
}

void expect_error_at(const std::string& text, const std::string& where) {
  std::istringstream in(text);
  try {
    (void)read_pairs(in, "f.pairs");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_EQ(std::string(e.what()).rfind(where, 0), 0u) << e.what();
  }
}

TEST(PairIo, ErrorsCarryLineNumbers) {
  expect_error_at("pairs 1\n", "f.pairs:1:");
  expect_error_at("gaussianface-pairs 2\n", "f.pairs:1:");
  expect_error_at("gaussianface-pairs 1\n1 2\n", "f.pairs:2:");
  expect_error_at("gaussianface-pairs 1\n1 1 2\n1 0 0\n0.5\n", "f.pairs:4:");
  expect_error_at("gaussianface-pairs 1\n1 1 2\n1 0 0\n0.5 1 2\n", "f.pairs:4:");
  expect_error_at("gaussianface-pairs 1\n1 1 2\n3 0 0\n", "f.pairs:3:");
  expect_error_at("gaussianface-pairs 1\n1 1 2\n1 0 0\n1 2\n", "f.pairs:5:");
}

}  // namespace
}  // namespace gf
