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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "gaussianface/core/kernel.hpp"
#include "gaussianface/simd/kernel_rows.hpp"
#include "support.hpp"

namespace gf {
namespace {

using simd::Isa;

class IsaGuard {
 public:
  IsaGuard() : saved_(simd::active_isa()) {}
  ~IsaGuard() { simd::set_isa(saved_); }

 private:
  Isa saved_;
};

struct RowCase {
  Eigen::MatrixXd X;
  Eigen::VectorXd q;
  Eigen::VectorXd prec;
  Eigen::VectorXd g;
};

RowCase make_case(Rng& rng, int n, int d) {
  RowCase c;
  c.X = testing::random_matrix(rng, n, d);
  c.q = testing::random_matrix(rng, d, 1);
  c.prec = Eigen::VectorXd(d);
  for (int m = 0; m < d; ++m) c.prec[m] = rng.uniform(0.05, 4.0);
  c.g = testing::random_matrix(rng, n, 1);
  return c;
}

simd::PointBlock block(const RowCase& c) {
  return {c.X.data(), c.X.rows(), static_cast<int>(c.X.rows()), static_cast<int>(c.X.cols())};
}

double rel(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

TEST(Simd, ReferenceMatchesDirectFormula) {
  IsaGuard guard;
  simd::set_isa(Isa::kScalar);
  Rng rng(3);
  const RowCase c = make_case(rng, 13, 3);
  std::vector<double> out(13);
  simd::gauss_row(block(c), c.q.data(), c.prec.data(), out.data());
  for (int l = 0; l < 13; ++l) {
    double s = 0;
    for (int m = 0; m < 3; ++m) s += c.prec[m] * std::pow(c.q[m] - c.X(l, m), 2);
    EXPECT_LE(rel(out[static_cast<std::size_t>(l)], std::exp(-0.5 * s)), 1e-14);
  }
}

TEST(Simd, Avx2MatchesScalarOnRows) {
  if (!simd::isa_supported(Isa::kAvx2)) GTEST_SKIP() << "no AVX2 on this CPU";
  IsaGuard guard;
  Rng rng(5);
  for (int n : {1, 2, 3, 4, 5, 7, 8, 9, 31, 64, 101}) {
    for (int d : {1, 2, 5}) {
      const RowCase c = make_case(rng, n, d);
      std::vector<double> a(static_cast<std::size_t>(n));
      std::vector<double> b(static_cast<std::size_t>(n));
      simd::set_isa(Isa::kScalar);
      simd::gauss_row(block(c), c.q.data(), c.prec.data(), a.data());
      simd::set_isa(Isa::kAvx2);
      simd::gauss_row(block(c), c.q.data(), c.prec.data(), b.data());
      for (int l = 0; l < n; ++l) {
        EXPECT_LE(rel(a[static_cast<std::size_t>(l)], b[static_cast<std::size_t>(l)]), 1e-13) << "n=" << n << " d=" << d;
      }
    }
  }
}

TEST(Simd, Avx2MatchesScalarOnContractions) {
  if (!simd::isa_supported(Isa::kAvx2)) GTEST_SKIP() << "no AVX2 on this CPU";
  IsaGuard guard;
  Rng rng(7);
  for (int n : {1, 3, 4, 6, 17, 50}) {
    for (int d : {1, 2, 4}) {
      const RowCase c = make_case(rng, n, d);
      std::vector<double> a(static_cast<std::size_t>(1 + 2 * d), 0.25);
      std::vector<double> b = a;
      simd::set_isa(Isa::kScalar);
      simd::gauss_row_contract(block(c), c.q.data(), c.prec.data(), c.g.data(), a.data());
      simd::set_isa(Isa::kAvx2);
      simd::gauss_row_contract(block(c), c.q.data(), c.prec.data(), c.g.data(), b.data());
      // Sums of mixed-sign terms: compare against the scale of the summands.
      const double scale = c.g.cwiseAbs().sum() * (1.0 + c.X.cwiseAbs().maxCoeff() + c.q.cwiseAbs().maxCoeff());
      for (std::size_t k = 0; k < a.size(); ++k) EXPECT_LE(std::abs(a[k] - b[k]), 1e-13 * scale * scale);
    }
  }
}

TEST(Simd, ExpMatchesStdExp) {
  IsaGuard guard;
  std::vector<double> base;
  for (double x = -745.0; x <= 0.0; x += 0.731) base.push_back(x);
  base.push_back(0.0);
  base.push_back(-1e-300);
  for (Isa isa : {Isa::kScalar, Isa::kAvx2}) {
    if (!simd::isa_supported(isa)) continue;
    simd::set_isa(isa);
    std::vector<double> v = base;
    simd::exp_inplace(v.data(), static_cast<int>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double ref = std::exp(base[i]);
      if (ref < 1e-300) {
        EXPECT_LE(std::abs(v[i]), 1e-290);
      } else {
        EXPECT_LE(rel(v[i], ref), 1e-14) << simd::isa_name(isa) << " x=" << base[i];
      }
    }
  }
}

TEST(Simd, KernelMatrixAgreesAcrossIsas) {
  if (!simd::isa_supported(Isa::kAvx2)) GTEST_SKIP() << "no AVX2 on this CPU";
  IsaGuard guard;
  Rng rng(11);
  const Eigen::MatrixXd Z = testing::random_matrix(rng, 37, 2);
  const HyperParams th = HyperParams::isotropic(2, 1.3, 0.7, 0.05, 8.0);
  simd::set_isa(Isa::kScalar);
  const Eigen::MatrixXd a = kernel_matrix(Z, th);
  simd::set_isa(Isa::kAvx2);
  const Eigen::MatrixXd b = kernel_matrix(Z, th);
  EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Simd, PinningUnsupportedIsaThrows) {
  if (simd::isa_supported(Isa::kAvx2)) GTEST_SKIP() << "AVX2 available";
  EXPECT_ANY_THROW(simd::set_isa(Isa::kAvx2));
}

}  // namespace
}  // namespace gf
