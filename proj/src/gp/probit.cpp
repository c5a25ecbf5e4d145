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

#include "gaussianface/gp/probit.hpp"

#include <cmath>
#include <numbers>

namespace gf::probit {

namespace {
constexpr double kInvSqrt2 = 0.70710678118654752440;
constexpr double kLogSqrt2Pi = 0.91893853320467274178;
constexpr double kAsymptoticCut = -10.0;

// Phi(z)/N(z) for z << 0: (1/|z|)(1 - 1/z^2 + 3/z^4 - 15/z^6 + 105/z^8 - 945/z^10).
double tail_ratio(double z) {
  const double w = 1.0 / (z * z);
  const double series = 1.0 + w * (-1.0 + w * (3.0 + w * (-15.0 + w * (105.0 + w * -945.0))));
  return series / -z;
}
}  // namespace

double cdf(double z) { return 0.5 * std::erfc(-z * kInvSqrt2); }

double log_cdf(double z) {
  if (z < kAsymptoticCut) return -0.5 * z * z - kLogSqrt2Pi + std::log(tail_ratio(z));
  if (z > 5.0) return std::log1p(-0.5 * std::erfc(z * kInvSqrt2));
  return std::log(cdf(z));
}

double mills_ratio(double z) {
  if (z < kAsymptoticCut) return 1.0 / tail_ratio(z);
  const double log_pdf = -0.5 * z * z - kLogSqrt2Pi;
  return std::exp(log_pdf - log_cdf(z));
}

Derivatives log_likelihood(double y, double f) {
  const double z = y * f;
  const double r = mills_ratio(z);
  Derivatives out{};
  out.log_lik = log_cdf(z);
  out.d1 = y * r;
  const double w = r * (z + r);  // -d2, in (0, 1)
  out.d2 = -w;
  out.d3 = y * (2.0 * r * r * r + 3.0 * z * r * r + (z * z - 1.0) * r);
  return out;
}

}  // namespace gf::probit
