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

#include "gaussianface/io/json_io.hpp"

#include <algorithm>
#include <limits>

#include "gaussianface/errors.hpp"

namespace gf::json_io {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& what) {
  throw ConfigError("field '" + path + "': " + what);
}

double as_number(const Json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

}  // namespace

std::string join(const std::string& path, const std::string& key) { return path.empty() ? key : path + "." + key; }

Json from_matrix(const Eigen::MatrixXd& M) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < M.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Json from_vector(const Eigen::VectorXd& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

Eigen::MatrixXd to_matrix(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows == 0 ? Eigen::Index{0} : static_cast<Eigen::Index>(j.at(0).size());
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const auto& row = j.at(static_cast<std::size_t>(i));
    const std::string rp = path + "[" + std::to_string(i) + "]";
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) fail(rp, "rows must have equal length");
    for (Eigen::Index c = 0; c < cols; ++c) M(i, c) = as_number(row.at(static_cast<std::size_t>(c)), rp);
  }
  return M;
}

Eigen::VectorXd to_vector(const Json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = as_number(j[i], path);
  return v;
}

void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) fail(path.empty() ? "<root>" : path, "expected an object");
}

void check_keys(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  require_object(j, path);
  for (auto it = j.begin(); it != j.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(), [&](const char* k) { return it.key() == k; });
    if (!known) fail(join(path, it.key()), "unknown field");
  }
}

const Json& member(const Json& j, const std::string& path, const char* key) {
  require_object(j, path);
  const auto it = j.find(key);
  if (it == j.end()) fail(join(path, key), "missing");
  return *it;
}

void read_number(const Json& j, const std::string& path, const char* key, double& out) {
  const auto it = j.find(key);
  if (it != j.end()) out = as_number(*it, join(path, key));
}

void read_int(const Json& j, const std::string& path, const char* key, int& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_number_integer()) fail(join(path, key), "expected an integer");
  const auto v = it->get<long long>();
  if (v < std::numeric_limits<int>::min() || v > std::numeric_limits<int>::max()) fail(join(path, key), "out of range");
  out = static_cast<int>(v);
}

void read_u64(const Json& j, const std::string& path, const char* key, std::uint64_t& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_number_unsigned()) fail(join(path, key), "expected a non-negative integer");
  out = it->get<std::uint64_t>();
}

void read_bool(const Json& j, const std::string& path, const char* key, bool& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_boolean()) fail(join(path, key), "expected true or false");
  out = it->get<bool>();
}

void read_string(const Json& j, const std::string& path, const char* key, std::string& out) {
  const auto it = j.find(key);
  if (it == j.end()) return;
  if (!it->is_string()) fail(join(path, key), "expected a string");
  out = it->get<std::string>();
}

}  // namespace gf::json_io
