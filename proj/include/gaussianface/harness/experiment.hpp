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

#include <string>
#include <vector>

#include "gaussianface/harness/config.hpp"
#include "gaussianface/harness/eval.hpp"

namespace gf {

enum class Method {
  kBc,        ///< classifier on patch-similarity vectors
  kCombined,  ///< classifier on codebook features
};

[[nodiscard]] const char* method_name(Method m);
[[nodiscard]] Method parse_method(const std::string& name);

/// Target from labeled pairs, one source domain per source pair set.
[[nodiscard]] ModelData bc_model_data(const std::vector<FacePair>& train, const std::vector<PairSet>& sources,
                                      Similarity kind);

[[nodiscard]] BcModel train_bc(const std::vector<FacePair>& train, const std::vector<PairSet>& sources,
                               const HarnessConfig& cfg);

/// Joint-vector model on a seeded subsample plus its codebook.
[[nodiscard]] FeModel train_fe(const std::vector<FacePair>& train, const std::vector<PairSet>& sources,
                               const HarnessConfig& cfg);

/// FE model on `train`, then a classifier on the standardized features of the labeled training pairs.
[[nodiscard]] CombinedModel train_combined(const std::vector<FacePair>& train, const std::vector<PairSet>& sources,
                                           const HarnessConfig& cfg);

[[nodiscard]] FoldScorer make_scorer(Method method, const HarnessConfig& cfg);

struct Selection {
  double beta = 0.0;
  double sigma = 1.0;
  int anchors = 0;
  double accuracy = 0.0;
};

/// Grid search on a held-out split of a validation draw (seed
/// eval.validation_seed): beta x sigma first, then the anchor grid.
[[nodiscard]] Selection select_hyperparameters(const HarnessConfig& cfg, Method method, int sources);

/// Selection (when enabled) followed by k-fold evaluation on `domains`.
[[nodiscard]] EvalReport run_evaluation(HarnessConfig cfg, const std::vector<PairSet>& domains, Method method,
                                        Selection* chosen = nullptr);

/// Report as JSON (no wall-clock fields, so reruns are byte-identical).
[[nodiscard]] json_io::Json report_to_json(const EvalReport& rep, const Selection* chosen);

}  // namespace gf
