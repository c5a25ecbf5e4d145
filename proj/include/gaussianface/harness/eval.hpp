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
#include <functional>
#include <string>
#include <vector>

#include "gaussianface/pipeline/pair_io.hpp"

namespace gf {

/// Pair-to-fold assignment in which no identity appears in two folds.
struct FoldPlan {
  int k = 0;
  std::vector<int> fold_of_pair;

  [[nodiscard]] std::vector<int> members(int fold) const;
};

/// Groups pairs by connected identity components (union-find over id_a/id_b),
/// shuffles the components with `seed`, and deals them largest-first to the
/// currently smallest fold. Throws ContractViolation with fewer than k components.
[[nodiscard]] FoldPlan make_folds(const PairSet& set, int k, std::uint64_t seed);

struct RocPoint {
  double fpr = 0.0;
  double tpr = 0.0;
};

struct RocCurve {
  std::vector<RocPoint> points;  ///< from (0,0) to (1,1), thresholds descending
  double auc = 0.0;
};

/// Threshold sweep over distinct scores (ties move together); trapezoid AUC.
/// Labels are +1/-1. Throws ContractViolation unless both classes are present.
[[nodiscard]] RocCurve roc_curve(const std::vector<double>& scores, const std::vector<int>& labels);

/// "fpr,tpr" header, six decimals.
[[nodiscard]] std::string roc_csv(const RocCurve& roc);

struct PairedTTest {
  double mean_difference = 0.0;
  double t = 0.0;
  int df = 0;
  double p_one_sided = 1.0;  ///< H1: mean(a - b) > 0
};

[[nodiscard]] PairedTTest paired_t_test(const std::vector<double>& a, const std::vector<double>& b);

/// Scores (probability of "same") for the test pairs of one fold.
using FoldScorer = std::function<std::vector<double>(const std::vector<FacePair>& train,
                                                     const std::vector<PairSet>& sources,
                                                     const std::vector<FacePair>& test)>;

struct EvalReport {
  std::string method;
  int sources = 0;
  std::vector<double> fold_accuracy;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  RocCurve roc;
  double runtime_seconds = 0.0;
  std::string config_hash;
  std::vector<double> scores;  ///< per target pair, from the fold where it was tested
  std::vector<int> labels;
};

/// k identity-disjoint folds over domains[0]; the scorer trains on k-1 folds
/// plus domains[1..] and scores the held-out fold.
[[nodiscard]] EvalReport kfold_eval(const std::vector<PairSet>& domains, int k, std::uint64_t seed,
                                    const FoldScorer& scorer, double threshold);

[[nodiscard]] double mean_of(const std::vector<double>& v);
/// Sample standard deviation (n - 1 denominator); 0 for fewer than two values.
[[nodiscard]] double stddev_of(const std::vector<double>& v);

}  // namespace gf
