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

#include <atomic>
#include <cstdlib>
#include <cstring>

#include "gaussianface/errors.hpp"
#include "kernel_rows_impl.hpp"

namespace gf::simd {

namespace {

bool cpu_has_avx2() noexcept {
#if defined(GF_HAVE_AVX2_TU) && (defined(__x86_64__) || defined(__i386__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

Isa detect() noexcept {
  if (const char* env = std::getenv("GF_SIMD"); env != nullptr && std::strcmp(env, "scalar") == 0) {
    return Isa::kScalar;
  }
  return cpu_has_avx2() ? Isa::kAvx2 : Isa::kScalar;
}

std::atomic<Isa>& current() {
  static std::atomic<Isa> isa{detect()};
  return isa;
}

}  // namespace

Isa active_isa() noexcept { return current().load(std::memory_order_relaxed); }

bool isa_supported(Isa isa) noexcept { return isa == Isa::kScalar || cpu_has_avx2(); }

std::string_view isa_name(Isa isa) noexcept { return isa == Isa::kAvx2 ? "avx2" : "scalar"; }

void set_isa(Isa isa) {
  require(isa_supported(isa), "requested SIMD level is not supported by this CPU");
  current().store(isa, std::memory_order_relaxed);
}

#if defined(GF_HAVE_AVX2_TU)
#define GF_DISPATCH(fn, ...)                                             \
  (active_isa() == Isa::kAvx2 ? avx2::fn(__VA_ARGS__) : scalar::fn(__VA_ARGS__))
#else
#define GF_DISPATCH(fn, ...) scalar::fn(__VA_ARGS__)
#endif

void gauss_row(const PointBlock& pts, const double* query, const double* prec, double* out) {
  GF_DISPATCH(gauss_row, pts, query, prec, out);
}

void gauss_row_contract(const PointBlock& pts, const double* query, const double* prec,
                        const double* g, double* acc) {
  GF_DISPATCH(gauss_row_contract, pts, query, prec, g, acc);
}

void exp_inplace(double* values, int n) { GF_DISPATCH(exp_inplace, values, n); }

#undef GF_DISPATCH

}  // namespace gf::simd
