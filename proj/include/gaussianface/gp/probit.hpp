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

namespace gf::probit {

/// Standard normal CDF.
[[nodiscard]] double cdf(double z);
/// log Phi(z), accurate in both tails.
[[nodiscard]] double log_cdf(double z);
/// Inverse Mills ratio N(z)/Phi(z); asymptotic series below z = -10.
[[nodiscard]] double mills_ratio(double z);

/// Derivatives of log Phi(y f) with respect to f.
struct Derivatives {
  double log_lik;
  double d1;
  double d2;
  double d3;
};
[[nodiscard]] Derivatives log_likelihood(double y, double f);

}  // namespace gf::probit
