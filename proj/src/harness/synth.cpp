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

#include "gaussianface/harness/synth.hpp"

#include "gaussianface/errors.hpp"
#include "gaussianface/random.hpp"

namespace gf {

namespace {

// splitmix64 step: independent seeds for the shared model and each domain.
std::uint64_t mix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

Eigen::MatrixXd normal_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd M(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) M(i, j) = rng.normal();
  }
  return M;
}

struct DomainTransform {
  Eigen::MatrixXd A;  // F x F
  Eigen::VectorXd t;  // F
  double noise = 0.0;
};

PairSet make_domain(const SyntheticDomainSpec& spec, const std::vector<Eigen::MatrixXd>& maps,
                    const DomainTransform* tf, std::uint64_t seed, int id_offset) {
  Rng rng(seed);
  const int groups = spec.identity_groups;
  const int per = spec.identities_per_group;
  std::vector<Eigen::VectorXd> identities;
  identities.reserve(static_cast<std::size_t>(groups * per));
  for (int i = 0; i < groups * per; ++i) identities.push_back(normal_matrix(rng, spec.d_true, 1).col(0));

  auto image = [&](int id) {
    Eigen::MatrixXd feats(spec.P, spec.F);
    for (int p = 0; p < spec.P; ++p) {
      Eigen::VectorXd x = maps[static_cast<std::size_t>(p)] * identities[static_cast<std::size_t>(id)];
      for (int f = 0; f < spec.F; ++f) x[f] += spec.variation * rng.normal();
      if (tf != nullptr) {
        x = tf->A * x + tf->t;
        for (int f = 0; f < spec.F; ++f) x[f] += tf->noise * rng.normal();
      }
      feats.row(p) = x.transpose();
    }
    return feats;
  };

  PairSet set;
  set.P = spec.P;
  set.F = spec.F;
  const int total = spec.n_pairs_matched + spec.n_pairs_mismatched;
  for (int k = 0; k < total; ++k) {
    // Alternate labels so every group sees both kinds of pairs.
    const bool matched = (k % 2 == 0) ? k / 2 < spec.n_pairs_matched : k / 2 >= spec.n_pairs_mismatched;
    const int group = k % groups;
    const int base = group * per;
    FacePair pair;
    const int ia = base + static_cast<int>(rng.below(static_cast<std::uint64_t>(per)));
    int ib = ia;
    if (!matched) {
      ib = base + static_cast<int>(rng.below(static_cast<std::uint64_t>(per - 1)));
      if (ib >= ia) ++ib;
    }
    pair.a = image(ia);
    pair.b = image(ib);
    pair.label = matched ? 1 : -1;
    pair.id_a = id_offset + ia;
    pair.id_b = id_offset + ib;
    set.pairs.push_back(std::move(pair));
  }
  return set;
}

}  // namespace

void SyntheticDomainSpec::validate() const {
  require(n_pairs_matched >= 1 && n_pairs_mismatched >= 1, "synthetic spec: pair counts must be at least 1");
  require(P >= 1 && F >= 1 && d_true >= 1, "synthetic spec: P, F and d_true must be positive");
  require(domain_shift >= 0.0 && noise >= 0.0 && variation >= 0.0, "synthetic spec: scales must be non-negative");
  require(identity_groups >= 1, "synthetic spec: identity_groups must be positive");
  require(identities_per_group >= 2, "synthetic spec: identities_per_group must be at least 2");
}

std::vector<PairSet> gen_domains(const SyntheticDomainSpec& spec, int S) {
  spec.validate();
  require(S >= 0, "gen_domains: S must be non-negative");
  Rng shared(mix(spec.seed));
  std::vector<Eigen::MatrixXd> maps;
  for (int p = 0; p < spec.P; ++p) maps.push_back(normal_matrix(shared, spec.F, spec.d_true));

  const int ids_per_domain = spec.identity_groups * spec.identities_per_group;
  std::vector<PairSet> out;
  out.push_back(make_domain(spec, maps, nullptr, mix(spec.seed ^ 0x7A7A7A7AULL), 0));
  for (int i = 1; i <= S; ++i) {
    Rng trng(mix(spec.seed + 0x1000ULL * static_cast<std::uint64_t>(i)));
    DomainTransform tf;
    tf.A = Eigen::MatrixXd::Identity(spec.F, spec.F) + spec.domain_shift * normal_matrix(trng, spec.F, spec.F) /
                                                           std::sqrt(static_cast<double>(spec.F));
    tf.t = spec.domain_shift * normal_matrix(trng, spec.F, 1).col(0);
    tf.noise = spec.noise;
    out.push_back(make_domain(spec, maps, &tf, mix(spec.seed ^ (0x7A7A7A7AULL + static_cast<std::uint64_t>(i))),
                              i * ids_per_domain));
  }
  return out;
}

}  // namespace gf
