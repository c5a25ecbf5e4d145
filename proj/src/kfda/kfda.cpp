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

#include "gaussianface/kfda/kfda.hpp"

#include <cmath>

#include "gaussianface/errors.hpp"

namespace gf {

KfdaStructure build_kfda(const Eigen::VectorXd& labels, double lambda) {
  require(lambda > 0.0 && std::isfinite(lambda), "KFDA regularizer lambda must be positive");
  KfdaStructure s;
  s.lambda = lambda;
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    require(labels[i] == 1.0 || labels[i] == -1.0, "KFDA labels must be +1 or -1");
    if (labels[i] > 0) s.order.push_back(static_cast<int>(i));
  }
  s.n_pos = static_cast<int>(s.order.size());
  for (Eigen::Index i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0) s.order.push_back(static_cast<int>(i));
  }
  s.n_neg = static_cast<int>(labels.size()) - s.n_pos;
  if (s.n_pos == 0 || s.n_neg == 0) throw ContractViolation("KFDA undefined without both classes");
  s.a.resize(s.size());
  s.a.head(s.n_pos).setConstant(1.0 / s.n_pos);
  s.a.tail(s.n_neg).setConstant(-1.0 / s.n_neg);
  return s;
}

Eigen::MatrixXd KfdaStructure::A() const {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(size(), size());
  auto fill = [&out](int start, int m) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    out.block(start, start, m, m) =
        scale * (Eigen::MatrixXd::Identity(m, m) - Eigen::MatrixXd::Constant(m, m, 1.0 / m));
  };
  fill(0, n_pos);
  fill(n_pos, n_neg);
  return out;
}

Eigen::MatrixXd KfdaStructure::apply_A(const Eigen::MatrixXd& x) const {
  Eigen::MatrixXd out(x.rows(), x.cols());
  auto center = [&](int start, int m) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    auto blk = x.middleRows(start, m);
    const Eigen::RowVectorXd mean = blk.colwise().mean();
    out.middleRows(start, m) = scale * (blk.rowwise() - mean);
  };
  center(0, n_pos);
  center(n_pos, n_neg);
  return out;
}

Eigen::VectorXd KfdaStructure::a_original() const {
  Eigen::VectorXd out(size());
  for (int k = 0; k < size(); ++k) out[order[static_cast<std::size_t>(k)]] = a[k];
  return out;
}

namespace {

Eigen::MatrixXd permute_sym(const Eigen::MatrixXd& K, const std::vector<int>& order) {
  const auto n = static_cast<Eigen::Index>(order.size());
  Eigen::MatrixXd out(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) out(i, j) = K(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
  }
  return out;
}

Eigen::VectorXd scatter(const Eigen::VectorXd& block, const std::vector<int>& order) {
  Eigen::VectorXd out(block.size());
  for (Eigen::Index k = 0; k < block.size(); ++k) out[order[static_cast<std::size_t>(k)]] = block[k];
  return out;
}

Eigen::MatrixXd gather_rows(const Eigen::MatrixXd& M, const std::vector<int>& order) {
  Eigen::MatrixXd out(M.rows(), M.cols());
  for (Eigen::Index k = 0; k < M.rows(); ++k) out.row(k) = M.row(order[static_cast<std::size_t>(k)]);
  return out;
}

}  // namespace

KfdaValue kfda_evaluate(const Eigen::MatrixXd& K, const KfdaStructure& s) {
  require(K.rows() == s.size() && K.cols() == s.size(), "kfda: kernel size does not match labels");
  const double lambda = s.lambda;
  const Eigen::MatrixXd Kb = permute_sym(K, s.order);
  const Eigen::VectorXd Ka = Kb * s.a;
  const Eigen::VectorXd b = s.apply_A(Ka);
  Eigen::MatrixXd M = s.apply_A(s.apply_A(Kb).transpose());  // A K A (symmetric)
  M.diagonal().array() += lambda;
  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) throw NumericalError("KFDA system lambda I + A K A is not positive definite");
  const Eigen::VectorXd c = llt.solve(b);
  // a'Ka from class-block sums: one rounding per class term.
  const double np = s.n_pos, nn = s.n_neg;
  const double aKa = Kb.topLeftCorner(s.n_pos, s.n_pos).sum() / (np * np) -
                     2.0 * Kb.topRightCorner(s.n_pos, s.n_neg).sum() / (np * nn) +
                     Kb.bottomRightCorner(s.n_neg, s.n_neg).sum() / (nn * nn);
  KfdaValue out;
  out.value = (1.0 / lambda) * (aKa - b.dot(c));
  out.residual = scatter(s.a - s.apply_A(c), s.order);
  return out;
}

KfdaValue kfda_evaluate(const KernelOperator& K, const KfdaStructure& s) {
  require(K.size() == s.size(), "kfda: kernel size does not match labels");
  if (!K.is_low_rank()) return kfda_evaluate(K.matrix(), s);

  // K~ = Q Q^T + t I, so lambda I + A K~ A = D + (AQ)(AQ)^T with
  // D = lambda I + t A^2. On each class block A^2 = C/m with C the centering
  // projector, hence D^{-1} x = (x - mean)/(lambda + t/m) + mean/lambda.
  const double lambda = s.lambda;
  const double t = K.shift();
  const Eigen::MatrixXd Qb = gather_rows(K.anchors().Q, s.order);
  const int n_pos = s.n_pos;
  const int n_neg = s.n_neg;
  auto base_inverse = [lambda, t, n_pos, n_neg](const Eigen::MatrixXd& x) -> Eigen::MatrixXd {
    Eigen::MatrixXd out(x.rows(), x.cols());
    auto blk = [&](int start, int m) {
      auto xb = x.middleRows(start, m);
      const Eigen::RowVectorXd mean = xb.colwise().mean();
      const double within = 1.0 / (lambda + t / m);
      out.middleRows(start, m) = within * (xb.rowwise() - mean);
      out.middleRows(start, m).rowwise() += mean / lambda;
    };
    blk(0, n_pos);
    blk(n_pos, n_neg);
    return out;
  };
  const LowRankInverse Minv(s.apply_A(Qb), base_inverse);
  const Eigen::VectorXd Qta = Qb.transpose() * s.a;
  // A a = 0, so A K~ a = A Q Q^T a.
  const Eigen::VectorXd b = s.apply_A(Qb * Qta);
  const Eigen::VectorXd c = Minv.apply(b);
  const double aKa = Qta.squaredNorm() + t * s.a.squaredNorm();
  KfdaValue out;
  out.value = (aKa - b.dot(c)) / lambda;
  out.residual = scatter(s.a - s.apply_A(c), s.order);
  return out;
}

double kfda_objective(const Eigen::MatrixXd& K, const KfdaStructure& s) { return kfda_evaluate(K, s).value; }

double kfda_grad_theta(const Eigen::MatrixXd& K, const Eigen::MatrixXd& dK, const KfdaStructure& s) {
  const KfdaValue v = kfda_evaluate(K, s);
  return v.residual.dot(dK * v.residual) / s.lambda;
}

double kfda_grad_theta_printed(const Eigen::MatrixXd& K, const Eigen::MatrixXd& dK, const KfdaStructure& s) {
  require(K.rows() == s.size() && dK.rows() == s.size(), "kfda: kernel size does not match labels");
  const Eigen::MatrixXd Kb = permute_sym(K, s.order);
  const Eigen::MatrixXd dKb = permute_sym(dK, s.order);
  const Eigen::MatrixXd A = s.A();
  Eigen::MatrixXd M = A * Kb * A;
  M.diagonal().array() += s.lambda;
  const Eigen::MatrixXd At = A * M.llt().solve(A);
  const Eigen::VectorXd& a = s.a;
  const Eigen::VectorXd AtKa = At * (Kb * a);
  return (a.dot(dKb * a) - a.dot(dKb * (At * a)) + AtKa.dot(dKb * AtKa) - AtKa.dot(dKb * a)) / s.lambda;
}

double prior_log_density(double j_star, const PriorConfig& cfg) {
  require(cfg.sigma > 0.0, "prior sigma must be positive");
  const double s2 = cfg.sigma * cfg.sigma;
  return cfg.form == PriorForm::kNegativeFisher ? -j_star / s2 : -1.0 / (s2 * j_star);
}

double prior_log_density_slope(double j_star, const PriorConfig& cfg) {
  const double s2 = cfg.sigma * cfg.sigma;
  return cfg.form == PriorForm::kNegativeFisher ? -1.0 / s2 : 1.0 / (s2 * j_star * j_star);
}

double prior_log_density(const Eigen::MatrixXd& K, const KfdaStructure& s, const PriorConfig& cfg) {
  return prior_log_density(kfda_objective(K, s), cfg);
}

}  // namespace gf
