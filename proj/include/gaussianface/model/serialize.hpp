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

#include "gaussianface/io/json_io.hpp"
#include "gaussianface/model/train.hpp"

namespace gf {

inline constexpr int kModelFormatVersion = 1;

[[nodiscard]] json_io::Json train_config_to_json(const TrainConfig& cfg);
/// Overlays the fields present in `j` onto `cfg`; unknown fields are errors.
void train_config_from_json(const json_io::Json& j, const std::string& path, TrainConfig& cfg);

[[nodiscard]] const char* prior_form_name(PriorForm form);
[[nodiscard]] PriorForm parse_prior_form(const std::string& name, const std::string& path);

/// Self-describing model document: config, theta, per-domain data and
/// latents, anchors, training trace and the classifier's Newton iterate.
[[nodiscard]] json_io::Json model_to_json(const TrainedModel& model);
[[nodiscard]] TrainedModel model_from_json(const json_io::Json& doc);

void save_model(const TrainedModel& model, const std::string& path);
[[nodiscard]] TrainedModel load_model(const std::string& path);

}  // namespace gf
