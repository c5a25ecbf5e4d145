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

#include <cmath>

#include "kernel_rows_impl.hpp"

namespace gf::simd::scalar {

void gauss_row(const PointBlock& pts, const double* query, const double* prec, double* out) {
  for (int l = 0; l < pts.n; ++l) {
    double s = 0.0;
    for (int m = 0; m < pts.d; ++m) {
      const double diff = query[m] - pts.data[m * pts.ld + l];
      s += prec[m] * (diff * diff);
    }
    out[l] = std::exp(-0.5 * s);
  }
}

void gauss_row_contract(const PointBlock& pts, const double* query, const double* prec,
                        const double* g, double* acc) {
  const int d = pts.d;
  for (int l = 0; l < pts.n; ++l) {
    if (g[l] == 0.0) continue;
    double s = 0.0;
    for (int m = 0; m < d; ++m) {
      const double diff = query[m] - pts.data[m * pts.ld + l];
      s += prec[m] * (diff * diff);
    }
    const double ge = g[l] * std::exp(-0.5 * s);
    acc[0] += ge;
    for (int m = 0; m < d; ++m) {
      const double diff = query[m] - pts.data[m * pts.ld + l];
      acc[1 + m] += ge * (diff * diff);
      acc[1 + d + m] += ge * diff;
    }
  }
}

void exp_inplace(double* values, int n) {
  for (int i = 0; i < n; ++i) values[i] = std::exp(values[i]);
}

}  // namespace gf::simd::scalar
