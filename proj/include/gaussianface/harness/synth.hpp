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
#include <vector>

#include "gaussianface/pipeline/pair_io.hpp"

namespace gf {

/// Seeded generator of pair sets that share one latent identity model.
///
/// Every patch p has a fixed map M_p (F x d_true) shared by all domains. An
/// identity is a latent u ~ N(0, I); one image of it has descriptors
/// M_p u + variation * e. Identities are drawn in disjoint groups and every
/// pair uses identities of a single group, so identity-disjoint folds exist.
/// Source domain i transforms every descriptor by (I + shift R_i) x + shift t_i
/// and adds noise * e, with its own seeded R_i, t_i.
struct SyntheticDomainSpec {
  int n_pairs_matched = 200;
  int n_pairs_mismatched = 200;
  int P = 16;
  int F = 8;
  int d_true = 2;
  double domain_shift = 0.3;
  double noise = 0.1;
  double variation = 0.5;
  int identity_groups = 50;
  int identities_per_group = 4;
  std::uint64_t seed = 7;

  void validate() const;
};

/// Element 0 is the target, elements 1..S the sources. The target does not
/// depend on S, so runs with different S share the same target data.
[[nodiscard]] std::vector<PairSet> gen_domains(const SyntheticDomainSpec& spec, int S);

}  // namespace gf
