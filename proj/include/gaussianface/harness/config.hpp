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

#include "gaussianface/cluster/gp_cluster.hpp"
#include "gaussianface/harness/synth.hpp"
#include "gaussianface/io/json_io.hpp"
#include "gaussianface/model/train.hpp"
#include "gaussianface/pipeline/pipelines.hpp"

namespace gf {

inline constexpr int kConfigVersion = 1;

struct PipelineConfig {
  Similarity similarity = Similarity::kCosine;
  double threshold = 0.5;
  int fe_max_points = 400;  ///< joint vectors kept for FE training
  std::uint64_t fe_seed = 3;
  bool fe_use_sources = false;
};

struct EvalConfig {
  int folds = 10;
  std::uint64_t seed = 11;
  int sources = 3;
  /// Pick beta and sigma (then the anchor count) on a separate validation set.
  bool select = true;
  std::vector<double> beta_grid{0.0, 0.05, 0.1, 0.5, 1.0};
  std::vector<double> sigma_grid{0.1, 1.0, 10.0};
  std::vector<int> anchor_grid;  ///< empty: keep model.anchors.count
  double validation_fraction = 0.3;
  std::uint64_t validation_seed = 101;
};

struct HarnessConfig {
  TrainConfig model;
  ClusterOptions cluster;
  PipelineConfig pipeline;
  SyntheticDomainSpec synth;
  EvalConfig eval;
};

[[nodiscard]] json_io::Json config_to_json(const HarnessConfig& cfg);
/// Strict parse: unknown fields, wrong types, bad values and version
/// mismatches raise ConfigError naming the field.
[[nodiscard]] HarnessConfig config_from_json(const json_io::Json& j);
[[nodiscard]] HarnessConfig load_config(const std::string& path);
void save_config(const HarnessConfig& cfg, const std::string& path);

/// Dotted paths of every tunable the config exposes.
[[nodiscard]] std::vector<std::string> tunable_paths();

/// FNV-1a over the canonical JSON dump, as 16 hex digits.
[[nodiscard]] std::string config_hash(const HarnessConfig& cfg);

}  // namespace gf
