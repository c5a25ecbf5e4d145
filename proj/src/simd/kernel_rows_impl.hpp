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

#include "gaussianface/simd/kernel_rows.hpp"

namespace gf::simd {

namespace scalar {
void gauss_row(const PointBlock& pts, const double* query, const double* prec, double* out);
void gauss_row_contract(const PointBlock& pts, const double* query, const double* prec,
                        const double* g, double* acc);
void exp_inplace(double* values, int n);
}  // namespace scalar

namespace avx2 {
void gauss_row(const PointBlock& pts, const double* query, const double* prec, double* out);
void gauss_row_contract(const PointBlock& pts, const double* query, const double* prec,
                        const double* g, double* acc);
void exp_inplace(double* values, int n);
}  // namespace avx2

}  // namespace gf::simd
