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

#include "gaussianface/harness/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "gaussianface/cluster/gp_cluster.hpp"
#include "gaussianface/core/anchors.hpp"
#include "gaussianface/core/woodbury.hpp"
#include "gaussianface/errors.hpp"
#include "gaussianface/gp/laplace.hpp"
#include "gaussianface/gp/predictor.hpp"
#include "gaussianface/kfda/kfda.hpp"
#include "gaussianface/random.hpp"

namespace gf {

bool CheckReport::all_passed() const {
  return std::all_of(results.begin(), results.end(), [](const CheckResult& r) { return r.passed; });
}

namespace {

Eigen::MatrixXd random_matrix(Rng& rng, Eigen::Index rows, Eigen::Index cols, double scale = 1.0) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = scale * rng.normal();
  }
  return m;
}

Eigen::VectorXd random_labels(Rng& rng, Eigen::Index n) {
  Eigen::VectorXd y(n);
  for (Eigen::Index i = 0; i < n; ++i) y[i] = rng.uniform() < 0.5 ? 1.0 : -1.0;
  // both classes, always
  y[0] = 1.0;
  y[n - 1] = -1.0;
  return y;
}

DomainData random_domain(Rng& rng, int max_rows, int D, DomainRole role) {
  const int n = 6 + static_cast<int>(rng.below(static_cast<std::uint64_t>(max_rows - 5)));
  DomainData dom;
  dom.X = random_matrix(rng, n, D);
  dom.y = random_labels(rng, n);
  dom.Z = random_matrix(rng, n, 2);
  dom.role = role;
  return dom;
}

double log_uniform(Rng& rng, double lo, double hi) { return std::exp(rng.uniform(std::log(lo), std::log(hi))); }

std::string fmt_error(double e, double tol) {
  std::ostringstream os;
  os.precision(3);
  os << "max rel error " << e << " (tol " << tol << ")";
  return os.str();
}

CheckResult make_result(const std::string& name, double err, double tol) {
  CheckResult r;
  r.name = name;
  r.max_error = err;
  r.tolerance = tol;
  r.passed = std::isfinite(err) && err <= tol;
  r.detail = fmt_error(err, tol);
  return r;
}

}  // namespace

GradInstance make_grad_instance(std::uint64_t seed, int sources, double beta, const ObjectiveConfig& base,
                                int max_rows) {
  require(sources >= 0, "gradcheck: source count must be non-negative");
  require(max_rows >= 6, "gradcheck: max_rows must be at least 6");
  Rng rng(seed);
  GradInstance inst;
  const int D = 3 + static_cast<int>(rng.below(3));
  inst.data.target = random_domain(rng, max_rows, D, DomainRole::kTarget);
  for (int i = 0; i < sources; ++i) inst.data.sources.push_back(random_domain(rng, max_rows, D, DomainRole::kSource));
  inst.theta.theta0 = log_uniform(rng, 0.5, 2.0);
  inst.theta.ard = Eigen::VectorXd(2);
  inst.theta.ard[0] = log_uniform(rng, 0.3, 3.0);
  inst.theta.ard[1] = log_uniform(rng, 0.3, 3.0);
  inst.theta.bias = log_uniform(rng, 0.01, 0.3);
  inst.theta.noise_inv = log_uniform(rng, 2.0, 20.0);
  inst.cfg = base;
  inst.cfg.beta = beta;
  return inst;
}

double gradient_relative_error(const Eigen::VectorXd& analytic, const Eigen::VectorXd& numeric, double floor) {
  require(analytic.size() == numeric.size(), "gradient size mismatch");
  double worst = 0.0;
  for (Eigen::Index j = 0; j < analytic.size(); ++j) {
    const double a = analytic[j];
    const double n = numeric[j];
    if (!std::isfinite(a) || !std::isfinite(n)) return std::numeric_limits<double>::infinity();
    const double denom = std::max({std::abs(a), std::abs(n), floor});
    worst = std::max(worst, std::abs(a - n) / denom);
  }
  return worst;
}

Eigen::VectorXd numeric_theta_gradient(const GradInstance& inst, double h) {
  const Eigen::VectorXd x = inst.theta.to_log();
  Eigen::VectorXd g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[j] += h;
    xm[j] -= h;
    const double fp = model_objective(inst.data, HyperParams::from_log(xp), inst.cfg);
    const double fm = model_objective(inst.data, HyperParams::from_log(xm), inst.cfg);
    g[j] = (fp - fm) / (2.0 * h);
  }
  return g;
}

namespace {

// Rounding in L itself bounds how well a difference quotient can resolve a
// component; components below that level are compared absolutely.
double fd_floor(double f, double h) { return 1e-9 * std::max(1.0, std::abs(f)) / h; }

double latent_error(const GradInstance& inst, const AnchorPlan* plan, double h) {
  GradientRequest req;
  req.latent = true;
  const ObjectiveResult base = evaluate_model(inst.data, inst.theta, inst.cfg, plan, req);
  double worst = 0.0;
  auto check_domain = [&](DomainData& dom, const Eigen::MatrixXd& analytic, ModelData& data) {
    Eigen::VectorXd a(dom.Z.size());
    Eigen::VectorXd n(dom.Z.size());
    Eigen::Index k = 0;
    for (Eigen::Index c = 0; c < dom.Z.cols(); ++c) {
      for (Eigen::Index r = 0; r < dom.Z.rows(); ++r, ++k) {
        const double z0 = dom.Z(r, c);
        dom.Z(r, c) = z0 + h;
        const double fp = evaluate_model(data, inst.theta, inst.cfg, plan, {}).value;
        dom.Z(r, c) = z0 - h;
        const double fm = evaluate_model(data, inst.theta, inst.cfg, plan, {}).value;
        dom.Z(r, c) = z0;
        a[k] = analytic(r, c);
        n[k] = (fp - fm) / (2.0 * h);
      }
    }
    worst = std::max(worst, gradient_relative_error(a, n, fd_floor(base.value, h)));
  };
  ModelData data = inst.data;
  check_domain(data.target, base.grad_Z_target, data);
  for (std::size_t i = 0; i < data.sources.size() && i < base.grad_Z_sources.size(); ++i) {
    check_domain(data.sources[i], base.grad_Z_sources[i], data);
  }
  return worst;
}

double anchor_theta_error(const GradInstance& inst, const AnchorPlan& plan, double h) {
  GradientRequest req;
  req.theta = true;
  const ObjectiveResult base = evaluate_model(inst.data, inst.theta, inst.cfg, &plan, req);
  const Eigen::VectorXd x = inst.theta.to_log();
  Eigen::VectorXd n(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[j] += h;
    xm[j] -= h;
    n[j] = (evaluate_model(inst.data, HyperParams::from_log(xp), inst.cfg, &plan, {}).value -
            evaluate_model(inst.data, HyperParams::from_log(xm), inst.cfg, &plan, {}).value) /
           (2.0 * h);
  }
  return gradient_relative_error(base.grad_theta, n, fd_floor(base.value, h));
}

double laplace_gradient_error(std::uint64_t seed, double h) {
  Rng rng(seed);
  const int n = 12;
  const Eigen::MatrixXd Z = random_matrix(rng, n, 2);
  const Eigen::VectorXd y = random_labels(rng, n);
  HyperParams theta = HyperParams::isotropic(2, 1.5, 0.8, 0.1, 10.0);
  const Eigen::VectorXd x = theta.to_log();
  std::vector<Eigen::MatrixXd> dK;
  for (int j = 0; j < theta.count(); ++j) {
    // dK/dlog(theta_j) = theta_j dK/dtheta_j
    dK.push_back(std::exp(x[j]) * kernel_matrix_derivative(Z, theta, j));
  }
  const Eigen::VectorXd analytic = log_marginal_laplace_gradient(kernel_matrix(Z, theta), y, dK);
  Eigen::VectorXd numeric(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Eigen::VectorXd xp = x;
    Eigen::VectorXd xm = x;
    xp[j] += h;
    xm[j] -= h;
    numeric[j] = (log_marginal_laplace(kernel_matrix(Z, HyperParams::from_log(xp)), y) -
                  log_marginal_laplace(kernel_matrix(Z, HyperParams::from_log(xm)), y)) /
                 (2.0 * h);
  }
  return gradient_relative_error(analytic, numeric, 1e-8);
}

}  // namespace

CheckReport run_gradcheck(const ObjectiveConfig& base, const GradcheckOptions& opts) {
  require(opts.instances >= 1, "gradcheck: need at least one instance");
  CheckReport report;
  const int source_counts[] = {0, 1, 2};
  const double betas[] = {0.0, 0.1, 1.0};
  double worst_theta = 0.0;
  double worst_latent = 0.0;
  for (int k = 0; k < opts.instances; ++k) {
    const int S = source_counts[k % 3];
    const double beta = betas[(k / 3) % 3];
    const GradInstance inst = make_grad_instance(opts.seed * 1000 + static_cast<std::uint64_t>(k), S, beta, base);
    const Eigen::VectorXd analytic = model_gradient_theta(inst.data, inst.theta, inst.cfg);
    const Eigen::VectorXd numeric = numeric_theta_gradient(inst, opts.step);
    const double f = model_objective(inst.data, inst.theta, inst.cfg);
    worst_theta = std::max(worst_theta, gradient_relative_error(analytic, numeric, fd_floor(f, opts.step)));
    if (k < 3) worst_latent = std::max(worst_latent, latent_error(inst, nullptr, opts.step));
  }
  report.add(make_result("objective theta gradient", worst_theta, opts.tolerance));
  report.add(make_result("objective latent gradient", worst_latent, opts.tolerance));

  // Anchor path: every block above 8 rows uses 5 anchors.
  double worst_anchor = 0.0;
  for (int k = 0; k < 3; ++k) {
    ObjectiveConfig cfg = base;
    cfg.anchors.threshold = 8;
    cfg.anchors.count = 5;
    const GradInstance inst = make_grad_instance(opts.seed * 1000 + 500 + static_cast<std::uint64_t>(k), k % 3,
                                                 k == 0 ? 0.0 : 0.5, cfg);
    const AnchorPlan plan = plan_anchors(inst.data, cfg.anchors, opts.seed + static_cast<std::uint64_t>(k));
    worst_anchor = std::max(worst_anchor, anchor_theta_error(inst, plan, opts.step));
    worst_anchor = std::max(worst_anchor, latent_error(inst, &plan, opts.step));
  }
  report.add(make_result("anchor objective gradients", worst_anchor, opts.tolerance));
  report.add(make_result("laplace evidence gradient", laplace_gradient_error(opts.seed, opts.step), opts.tolerance));
  return report;
}

double kfda_eigen_oracle(const Eigen::MatrixXd& K, const Eigen::VectorXd& labels, double lambda) {
  const Eigen::Index n = K.rows();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(K);
  const Eigen::VectorXd e = eig.eigenvalues().cwiseMax(0.0);
  // Feature map: row i of Phi is the image of point i.
  const Eigen::MatrixXd Phi = eig.eigenvectors() * e.cwiseSqrt().asDiagonal();
  Eigen::VectorXd mu_pos = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd mu_neg = Eigen::VectorXd::Zero(n);
  int n_pos = 0;
  int n_neg = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (labels[i] > 0) {
      mu_pos += Phi.row(i).transpose();
      ++n_pos;
    } else {
      mu_neg += Phi.row(i).transpose();
      ++n_neg;
    }
  }
  require(n_pos > 0 && n_neg > 0, "kfda oracle needs both classes");
  mu_pos /= n_pos;
  mu_neg /= n_neg;
  Eigen::MatrixXd Sw = lambda * Eigen::MatrixXd::Identity(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool pos = labels[i] > 0;
    const Eigen::VectorXd c = Phi.row(i).transpose() - (pos ? mu_pos : mu_neg);
    Sw += c * c.transpose() / (pos ? n_pos : n_neg);
  }
  const Eigen::VectorXd m = mu_pos - mu_neg;
  const Eigen::MatrixXd Sb = m * m.transpose();
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(Sb, Sw);
  return ges.eigenvalues().maxCoeff();
}

namespace {

double rel_frobenius(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).norm() / b.norm(); }

Eigen::MatrixXd smooth_latents(Rng& rng, int n) {
  Eigen::MatrixXd Z(n, 2);
  for (int i = 0; i < n; ++i) {
    const double t = 6.0 * i / n;
    Z(i, 0) = std::cos(t) * (1.0 + 0.3 * t) + 0.05 * rng.normal();
    Z(i, 1) = std::sin(t) * (1.0 + 0.3 * t) + 0.05 * rng.normal();
  }
  return Z;
}

void check_woodbury(CheckReport& report, std::uint64_t seed) {
  Rng rng(seed);
  const int n = 40;
  const Eigen::MatrixXd Z = smooth_latents(rng, n);
  const HyperParams theta = HyperParams::isotropic(2, 1.0, 1.0, 0.05, 10.0);
  const AnchorApprox approx = anchor_approx(Z, Z, theta);
  Eigen::MatrixXd smooth = kernel_matrix(Z, theta);
  smooth.diagonal().array() -= theta.noise();

  const double scale = 0.1;
  Eigen::MatrixXd reg_dense = smooth;
  reg_dense.diagonal().array() += scale;
  const double e_reg = rel_frobenius(woodbury_reg_inverse(approx.Q, scale).dense(), reg_dense.inverse());
  report.add(make_result("woodbury regularized inverse (q = n)", e_reg, 1e-8));

  Eigen::VectorXd W(n);
  for (int i = 0; i < n; ++i) W[i] = rng.uniform(0.05, 0.5);
  Eigen::MatrixXd kw_dense = smooth;
  kw_dense.diagonal() += W.cwiseInverse();
  const double e_kw = rel_frobenius(woodbury_kw_inverse(approx.Q, W).dense(), kw_dense.inverse());
  report.add(make_result("woodbury K + W^-1 inverse (q = n)", e_kw, 1e-8));
}

void check_kfda(CheckReport& report, std::uint64_t seed) {
  Rng rng(seed);
  const double lambda = 1e-8;
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int n = 4 + static_cast<int>(rng.below(9));
    const Eigen::MatrixXd G = random_matrix(rng, n, n);
    Eigen::MatrixXd K = G * G.transpose() / n;
    K.diagonal().array() += 0.1;
    const Eigen::VectorXd y = random_labels(rng, n);
    const double j = kfda_objective(K, build_kfda(y, lambda));
    const double oracle = kfda_eigen_oracle(K, y, lambda);
    worst = std::max(worst, std::abs(j - oracle) / std::abs(oracle));
  }
  report.add(make_result("kfda vs eigen oracle", worst, 1e-6));

  Eigen::VectorXd y(7);
  y << 1, 1, 1, -1, -1, -1, -1;
  const double j = kfda_objective(Eigen::MatrixXd::Identity(7, 7), build_kfda(y, lambda));
  const double expect = (1.0 / 3.0 + 1.0 / 4.0) / lambda;
  CheckResult r = make_result("kfda identity kernel", std::abs(j - expect) / expect, 0.0);
  report.add(r);
}

void check_laplace(CheckReport& report, std::uint64_t seed) {
  Rng rng(seed);
  double worst = 0.0;
  for (int t = 0; t < 10; ++t) {
    const int n = 5 + static_cast<int>(rng.below(26));
    const Eigen::MatrixXd Z = random_matrix(rng, n, 2);
    const Eigen::VectorXd y = random_labels(rng, n);
    const HyperParams theta = HyperParams::isotropic(2, rng.uniform(0.5, 5.0), rng.uniform(0.3, 3.0), 0.01, 20.0);
    worst = std::max(worst, laplace_mode(kernel_matrix(Z, theta), y).stationarity);
  }
  CheckResult r = make_result("laplace mode stationarity", worst, 1e-8);
  r.detail = "max stationarity " + std::to_string(worst);
  report.add(r);
}

}  // namespace

double rand_index(const std::vector<int>& a, const std::vector<int>& b) {
  require(a.size() == b.size(), "rand index: labelings differ in length");
  std::size_t agree = 0;
  std::size_t total = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      agree += static_cast<std::size_t>((a[i] == a[j]) == (b[i] == b[j]));
      ++total;
    }
  }
  return total == 0 ? 1.0 : static_cast<double>(agree) / static_cast<double>(total);
}

ThreeBlobs make_three_blobs(std::uint64_t seed, int per_blob) {
  Rng rng(seed);
  const double centers[3][2] = {{0.0, 0.0}, {4.0, 0.0}, {2.0, 3.5}};
  ThreeBlobs out;
  out.Z.resize(3 * per_blob, 2);
  out.y.resize(3 * per_blob);
  for (int b = 0; b < 3; ++b) {
    for (int i = 0; i < per_blob; ++i) {
      const int r = b * per_blob + i;
      out.Z(r, 0) = centers[b][0] + 0.3 * rng.normal();
      out.Z(r, 1) = centers[b][1] + 0.3 * rng.normal();
      out.y[r] = b == 1 ? -1.0 : 1.0;
      out.truth.push_back(b);
    }
  }
  out.theta = HyperParams::isotropic(2, 1.0, 1.0, 1e-3, 100.0);
  return out;
}

CheckReport run_selfcheck(std::uint64_t seed) {
  CheckReport report;
  check_woodbury(report, seed);
  check_kfda(report, seed + 1);
  check_laplace(report, seed + 2);

  const ThreeBlobs blobs = make_three_blobs(seed + 3, 30);
  const GpClassifier model = GpClassifier::fit(blobs.Z, blobs.y, blobs.theta);
  const ClusterResult cr = cluster(blobs.Z, model, ClusterOptions{});
  const double ri = rand_index(cr.labels, blobs.truth);
  CheckResult r;
  r.name = "clustering three blobs";
  r.passed = ri >= 0.95 && cr.descent_held;
  r.max_error = 1.0 - ri;
  r.tolerance = 0.05;
  r.detail = "rand index " + std::to_string(ri) + (cr.descent_held ? "" : ", descent violated");
  report.add(r);

  const Codebook cb = build_codebook(blobs.Z, cr.labels, model);
  const double wsum = cb.weights.sum();
  report.add(make_result("codebook weights sum", std::abs(wsum - 1.0), 1e-10));
  return report;
}

}  // namespace gf
