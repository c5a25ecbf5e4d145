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
#include <initializer_list>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

namespace gf::json_io {

using Json = nlohmann::json;

/// Matrices are arrays of rows; vectors are flat arrays. Doubles are written
/// in shortest round-trip form, so save/load is exact.
[[nodiscard]] Json from_matrix(const Eigen::MatrixXd& M);
[[nodiscard]] Json from_vector(const Eigen::VectorXd& v);
[[nodiscard]] Eigen::MatrixXd to_matrix(const Json& j, const std::string& path);
[[nodiscard]] Eigen::VectorXd to_vector(const Json& j, const std::string& path);

/// Object member access with ConfigError diagnostics naming the field path.
/// The `read_*` functions leave `out` untouched when the key is absent.
void require_object(const Json& j, const std::string& path);
void check_keys(const Json& j, const std::string& path, std::initializer_list<const char*> allowed);
[[nodiscard]] const Json& member(const Json& j, const std::string& path, const char* key);
void read_number(const Json& j, const std::string& path, const char* key, double& out);
void read_int(const Json& j, const std::string& path, const char* key, int& out);
void read_u64(const Json& j, const std::string& path, const char* key, std::uint64_t& out);
void read_bool(const Json& j, const std::string& path, const char* key, bool& out);
void read_string(const Json& j, const std::string& path, const char* key, std::string& out);

[[nodiscard]] std::string join(const std::string& path, const std::string& key);

}  // namespace gf::json_io
