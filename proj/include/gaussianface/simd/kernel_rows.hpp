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

// Inner loops of every kernel-matrix build and kernel-gradient contraction.
// Each routine has a scalar reference and an AVX2 variant; the variant is
// chosen once at startup from cpuid and can be pinned with GF_SIMD=scalar.

#include <cstddef>
#include <string_view>

namespace gf::simd {

enum class Isa { kScalar, kAvx2 };

/// Column-major block of `n` points of dimension `d`: coordinate m of point l
/// lives at data[m * ld + l]. Eigen's default MatrixXd (n x d) has this layout.
struct PointBlock {
  const double* data = nullptr;
  std::ptrdiff_t ld = 0;
  int n = 0;
  int d = 0;
};

[[nodiscard]] Isa active_isa() noexcept;
[[nodiscard]] bool isa_supported(Isa isa) noexcept;
[[nodiscard]] std::string_view isa_name(Isa isa) noexcept;

/// Pins the dispatch target. Throws ContractViolation if the CPU lacks `isa`.
void set_isa(Isa isa);

/// out[l] = exp(-1/2 * sum_m prec[m] * (query[m] - x_lm)^2) for l in [0, n).
void gauss_row(const PointBlock& pts, const double* query, const double* prec, double* out);

/// Weighted contraction of one kernel row, with e_l as in gauss_row and
/// delta_lm = query[m] - x_lm:
///   acc[0]       += sum_l g_l e_l
///   acc[1 + m]   += sum_l g_l e_l delta_lm^2
///   acc[1 + d + m] += sum_l g_l e_l delta_lm
/// `acc` has 1 + 2d slots and is accumulated into, not overwritten.
void gauss_row_contract(const PointBlock& pts, const double* query, const double* prec,
                        const double* g, double* acc);

/// Vectorized exp over a buffer; exposed for equivalence tests.
void exp_inplace(double* values, int n);

}  // namespace gf::simd
