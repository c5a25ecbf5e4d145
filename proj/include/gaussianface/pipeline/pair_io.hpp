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

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace gf {

/// Two faces as P per-patch descriptors of dimension F (rows = patches).
/// label is +1 (same person), -1 (different) or 0 (unknown). id_a and id_b
/// name the identities so evaluation folds can keep identities disjoint.
struct FacePair {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  int label = 0;
  int id_a = -1;
  int id_b = -1;

  [[nodiscard]] int patches() const noexcept { return static_cast<int>(a.rows()); }
  [[nodiscard]] int feature_dim() const noexcept { return static_cast<int>(a.cols()); }
  [[nodiscard]] FacePair swapped() const;
};

struct PairSet {
  int P = 0;
  int F = 0;
  std::vector<FacePair> pairs;

  /// Throws ContractViolation unless every pair is P x F on both sides.
  void validate() const;
};

/// Text layout:
///   line 1: "gaussianface-pairs 1"
///   line 2: n_pairs P F
///   per pair: "label id_a id_b", then P lines of F values for A, then P lines for B.
/// Values are written with 17 significant digits, so reading back is exact.
void write_pairs(std::ostream& out, const PairSet& set);
[[nodiscard]] PairSet read_pairs(std::istream& in, const std::string& name = "<stream>");

void save_pairs(const PairSet& set, const std::string& path);
[[nodiscard]] PairSet load_pairs(const std::string& path);

}  // namespace gf
