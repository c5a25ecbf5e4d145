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

#include <immintrin.h>

#include <cmath>

#include "kernel_rows_impl.hpp"

namespace gf::simd::avx2 {

namespace {

// Cephes-style exp: x = k ln2 + r with a two-part ln2, rational
// approximation on r, then scale by 2^k through the exponent field.
// Inputs are kernel exponents (<= 0); anything below the normal range
// flushes to zero.
inline __m256d exp_pd(__m256d x) {
  const __m256d kMax = _mm256_set1_pd(709.0);
  const __m256d kMin = _mm256_set1_pd(-708.3964185322641);
  const __m256d kLog2e = _mm256_set1_pd(1.4426950408889634073599);
  const __m256d kC1 = _mm256_set1_pd(6.93145751953125e-1);
  const __m256d kC2 = _mm256_set1_pd(1.42860682030941723212e-6);
  const __m256d kP0 = _mm256_set1_pd(1.26177193074810590878e-4);
  const __m256d kP1 = _mm256_set1_pd(3.02994407707441961300e-2);
  const __m256d kP2 = _mm256_set1_pd(9.99999999999999999910e-1);
  const __m256d kQ0 = _mm256_set1_pd(3.00198505138664455042e-6);
  const __m256d kQ1 = _mm256_set1_pd(2.52448340349684104192e-3);
  const __m256d kQ2 = _mm256_set1_pd(2.27265548208155028766e-1);
  const __m256d kQ3 = _mm256_set1_pd(2.00000000000000000009e0);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d two = _mm256_set1_pd(2.0);

  const __m256d underflow = _mm256_cmp_pd(x, kMin, _CMP_LT_OQ);
  x = _mm256_min_pd(x, kMax);
  x = _mm256_max_pd(x, kMin);

  const __m256d fx = _mm256_round_pd(_mm256_mul_pd(x, kLog2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_sub_pd(x, _mm256_mul_pd(fx, kC1));
  r = _mm256_sub_pd(r, _mm256_mul_pd(fx, kC2));
  const __m256d rr = _mm256_mul_pd(r, r);

  __m256d px = _mm256_fmadd_pd(kP0, rr, kP1);
  px = _mm256_fmadd_pd(px, rr, kP2);
  px = _mm256_mul_pd(px, r);
  __m256d qx = _mm256_fmadd_pd(kQ0, rr, kQ1);
  qx = _mm256_fmadd_pd(qx, rr, kQ2);
  qx = _mm256_fmadd_pd(qx, rr, kQ3);
  __m256d e = _mm256_div_pd(px, _mm256_sub_pd(qx, px));
  e = _mm256_fmadd_pd(two, e, one);

  // 2^fx: fx is integral and within [-1022, 1023] after clamping.
  const __m128i k32 = _mm256_cvtpd_epi32(fx);
  __m256i k64 = _mm256_cvtepi32_epi64(k32);
  k64 = _mm256_add_epi64(k64, _mm256_set1_epi64x(1023));
  k64 = _mm256_slli_epi64(k64, 52);
  e = _mm256_mul_pd(e, _mm256_castsi256_pd(k64));
  return _mm256_andnot_pd(underflow, e);
}

}  // namespace

void exp_inplace(double* values, int n) {
  int i = 0;
  for (; i + 4 <= n; i += 4) _mm256_storeu_pd(values + i, exp_pd(_mm256_loadu_pd(values + i)));
  for (; i < n; ++i) values[i] = std::exp(values[i]);
}

void gauss_row(const PointBlock& pts, const double* query, const double* prec, double* out) {
  const int n = pts.n;
  const int d = pts.d;
  const __m256d half = _mm256_set1_pd(-0.5);
  int l = 0;
  for (; l + 4 <= n; l += 4) {
    __m256d s = _mm256_setzero_pd();
    for (int m = 0; m < d; ++m) {
      const __m256d diff = _mm256_sub_pd(_mm256_set1_pd(query[m]), _mm256_loadu_pd(pts.data + m * pts.ld + l));
      s = _mm256_add_pd(s, _mm256_mul_pd(_mm256_set1_pd(prec[m]), _mm256_mul_pd(diff, diff)));
    }
    _mm256_storeu_pd(out + l, exp_pd(_mm256_mul_pd(half, s)));
  }
  for (; l < n; ++l) {
    double s = 0.0;
    for (int m = 0; m < d; ++m) {
      const double diff = query[m] - pts.data[m * pts.ld + l];
      s += prec[m] * (diff * diff);
    }
    out[l] = std::exp(-0.5 * s);
  }
}

void gauss_row_contract(const PointBlock& pts, const double* query, const double* prec,
                        const double* g, double* acc) {
  const int n = pts.n;
  const int d = pts.d;
  constexpr int kMaxDim = 32;
  if (d > kMaxDim) {
    gf::simd::scalar::gauss_row_contract(pts, query, prec, g, acc);
    return;
  }
  const __m256d half = _mm256_set1_pd(-0.5);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc_sq[kMaxDim];
  __m256d acc_lin[kMaxDim];
  __m256d diffs[kMaxDim];
  for (int m = 0; m < d; ++m) {
    acc_sq[m] = _mm256_setzero_pd();
    acc_lin[m] = _mm256_setzero_pd();
  }
  int l = 0;
  for (; l + 4 <= n; l += 4) {
    __m256d s = _mm256_setzero_pd();
    for (int m = 0; m < d; ++m) {
      diffs[m] = _mm256_sub_pd(_mm256_set1_pd(query[m]), _mm256_loadu_pd(pts.data + m * pts.ld + l));
      s = _mm256_add_pd(s, _mm256_mul_pd(_mm256_set1_pd(prec[m]), _mm256_mul_pd(diffs[m], diffs[m])));
    }
    const __m256d ge = _mm256_mul_pd(_mm256_loadu_pd(g + l), exp_pd(_mm256_mul_pd(half, s)));
    acc0 = _mm256_add_pd(acc0, ge);
    for (int m = 0; m < d; ++m) {
      const __m256d gd = _mm256_mul_pd(ge, diffs[m]);
      acc_lin[m] = _mm256_add_pd(acc_lin[m], gd);
      acc_sq[m] = _mm256_add_pd(acc_sq[m], _mm256_mul_pd(gd, diffs[m]));
    }
  }
  alignas(32) double lanes[4];
  auto hsum = [&lanes](__m256d v) {
    _mm256_store_pd(lanes, v);
    return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
  };
  acc[0] += hsum(acc0);
  for (int m = 0; m < d; ++m) {
    acc[1 + m] += hsum(acc_sq[m]);
    acc[1 + d + m] += hsum(acc_lin[m]);
  }
  if (l < n) {
    PointBlock tail{pts.data + l, pts.ld, n - l, d};
    gf::simd::scalar::gauss_row_contract(tail, query, prec, g + l, acc);
  }
}

}  // namespace gf::simd::avx2
