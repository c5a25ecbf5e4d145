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

#include "gaussianface/model/objective.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "gaussianface/core/anchors.hpp"
#include "gaussianface/core/kernel_operator.hpp"
#include "gaussianface/errors.hpp"

namespace gf {

namespace {

void validate_domain(const DomainData& dom, Eigen::Index D, Eigen::Index d, const std::string& name) {
  require(dom.X.rows() >= 1, name + ": no observations");
  require(dom.X.cols() == D, name + ": observation dimension differs from the target's");
  require(dom.Z.cols() == d, name + ": latent dimension differs from the target's");
  require(dom.Z.rows() == dom.X.rows() && dom.y.size() == dom.X.rows(), name + ": X, y and Z row counts differ");
  bool pos = false;
  bool neg = false;
  for (Eigen::Index i = 0; i < dom.y.size(); ++i) {
    require(dom.y[i] == 1.0 || dom.y[i] == -1.0, name + ": labels must be +1 or -1");
    pos = pos || dom.y[i] > 0;
    neg = neg || dom.y[i] < 0;
  }
  require(pos && neg, name + ": both classes are required");
}

KernelOperator make_operator(const Eigen::MatrixXd& Z, const HyperParams& theta, const AnchorConfig& cfg,
                             const Eigen::MatrixXd* anchors) {
  if (anchors != nullptr) return KernelOperator::low_rank(Z, *anchors, theta, cfg.tau_scale);
  return KernelOperator::dense(Z, theta);
}

std::optional<Eigen::MatrixXd> maybe_anchors(const Eigen::MatrixXd& Z, const AnchorConfig& cfg,
                                             std::uint64_t seed) {
  if (Z.rows() <= cfg.threshold) return std::nullopt;
  const int q = static_cast<int>(std::min<Eigen::Index>(cfg.count, Z.rows()));
  return kmeans_anchors(Z, q, seed);
}

const Eigen::MatrixXd* opt_ptr(const std::optional<Eigen::MatrixXd>& o) { return o ? &*o : nullptr; }

}  // namespace

void ModelData::validate() const {
  const auto D = target.X.cols();
  const auto d = target.Z.cols();
  require(d >= 1, "latent dimension must be at least 1");
  validate_domain(target, D, d, "target domain");
  for (std::size_t i = 0; i < sources.size(); ++i) {
    validate_domain(sources[i], D, d, "source domain " + std::to_string(i));
  }
}

AnchorPlan plan_anchors(const ModelData& data, const AnchorConfig& cfg, std::uint64_t seed) {
  AnchorPlan plan;
  plan.target = maybe_anchors(data.target.Z, cfg, seed);
  for (std::size_t i = 0; i < data.sources.size(); ++i) {
    plan.sources.push_back(maybe_anchors(data.sources[i].Z, cfg, seed + 1 + i));
    const DomainData joint = concatenate(data.target, data.sources[i]);
    plan.joint.push_back(maybe_anchors(joint.Z, cfg, seed + 1001 + i));
  }
  return plan;
}

double gplvm_loglik(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z, const HyperParams& theta) {
  require(X.rows() == Z.rows(), "gplvm_loglik: X and Z row counts differ");
  const auto op = KernelOperator::dense(Z, theta);
  const double N = static_cast<double>(X.rows());
  const double D = static_cast<double>(X.cols());
  const Eigen::MatrixXd KiX = op.solve(X);
  return -0.5 * N * D * std::log(2.0 * std::numbers::pi) - 0.5 * D * op.logdet() - 0.5 * X.cwiseProduct(KiX).sum();
}

double theta_log_prior(const HyperParams& theta) {
  double s = std::log(theta.theta0) + std::log(std::max(theta.bias, HyperParams::kMinBias)) +
             std::log(theta.noise_inv);
  for (int m = 0; m < theta.dim(); ++m) s += std::log(theta.ard[m]);
  return s;
}

PosteriorTerms block_posterior(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::MatrixXd& Z,
                               const HyperParams& theta, const ObjectiveConfig& cfg, const Eigen::MatrixXd* anchors,
                               GradientRequest request) {
  require(X.rows() == Z.rows() && y.size() == X.rows(), "block_posterior: X, y and Z row counts differ");
  require(Z.cols() == theta.dim(), "block_posterior: latent dimension does not match kernel");
  const KfdaStructure s = build_kfda(y, cfg.prior.lambda);
  const auto op = make_operator(Z, theta, cfg.anchors, anchors);
  const double N = static_cast<double>(X.rows());
  const double D = static_cast<double>(X.cols());

  PosteriorTerms t;
  const Eigen::MatrixXd KiX = op.solve(X);
  t.gplvm = -0.5 * N * D * std::log(2.0 * std::numbers::pi) - 0.5 * D * op.logdet() - 0.5 * X.cwiseProduct(KiX).sum();
  const KfdaValue kv = kfda_evaluate(op, s);
  t.j_star = kv.value;
  t.prior = prior_log_density(kv.value, cfg.prior);
  t.theta_prior = theta_log_prior(theta);
  t.value = t.gplvm + t.prior + t.theta_prior;
  if (!std::isfinite(t.value)) throw NumericalError("log posterior is not finite");

  if (request.theta || request.latent) {
    KernelCotangent cot(op);
    cot.add_inverse(-0.5 * D);
    cot.add_outer(0.5, KiX);
    cot.add_outer(prior_log_density_slope(kv.value, cfg.prior) / cfg.prior.lambda, kv.residual);
    cot.contract(request.theta ? &t.grad_theta : nullptr, request.latent ? &t.grad_Z : nullptr);
    if (request.theta) t.grad_theta.array() += 1.0;
  }
  return t;
}

double domain_log_posterior(const DomainData& dom, const HyperParams& theta, const ObjectiveConfig& cfg) {
  return block_posterior(dom.X, dom.y, dom.Z, theta, cfg, nullptr, {}).value;
}

DomainData concatenate(const DomainData& first, const DomainData& second) {
  require(first.X.cols() == second.X.cols() && first.Z.cols() == second.Z.cols(),
          "concatenate: domain dimensions differ");
  DomainData out;
  out.role = first.role;
  out.X.resize(first.X.rows() + second.X.rows(), first.X.cols());
  out.X << first.X, second.X;
  out.Z.resize(first.Z.rows() + second.Z.rows(), first.Z.cols());
  out.Z << first.Z, second.Z;
  out.y.resize(first.y.size() + second.y.size());
  out.y << first.y, second.y;
  return out;
}

double joint_log_posterior(const DomainData& target, const DomainData& source, const HyperParams& theta,
                           const ObjectiveConfig& cfg) {
  return domain_log_posterior(concatenate(target, source), theta, cfg);
}

bool multitask_active(const ModelData& data, const ObjectiveConfig& cfg) noexcept {
  return cfg.multitask_enabled && cfg.beta > 0.0 && !data.sources.empty();
}

ObjectiveResult evaluate_model(const ModelData& data, const HyperParams& theta, const ObjectiveConfig& cfg,
                               const AnchorPlan* plan, GradientRequest request) {
  require(cfg.beta >= 0.0, "beta must be non-negative");
  const auto nT = data.target.size();
  ObjectiveResult r;

  const PosteriorTerms tT = block_posterior(data.target.X, data.target.y, data.target.Z, theta, cfg,
                                            plan ? opt_ptr(plan->target) : nullptr, request);
  r.l_target = tT.value;

  if (!multitask_active(data, cfg)) {
    r.value = -tT.value;
    if (request.theta) r.grad_theta = -tT.grad_theta;
    if (request.latent) r.grad_Z_target = -tT.grad_Z;
    return r;
  }

  const double beta = cfg.beta;
  const auto S = static_cast<double>(data.sources.size());
  const double PT = std::exp(tT.value / static_cast<double>(nT));
  r.value = -tT.value + beta * PT * tT.value;
  const double wT = -1.0 + beta * PT * (1.0 + tT.value / static_cast<double>(nT));
  if (request.theta) r.grad_theta = wT * tT.grad_theta;
  if (request.latent) r.grad_Z_target = wT * tT.grad_Z;

  for (std::size_t i = 0; i < data.sources.size(); ++i) {
    const DomainData& src = data.sources[i];
    const PosteriorTerms ti =
        block_posterior(src.X, src.y, src.Z, theta, cfg, plan ? opt_ptr(plan->sources[i]) : nullptr, request);
    const DomainData joint = concatenate(data.target, src);
    const PosteriorTerms tj = block_posterior(joint.X, joint.y, joint.Z, theta, cfg,
                                              plan ? opt_ptr(plan->joint[i]) : nullptr, request);
    r.l_source.push_back(ti.value);
    r.l_joint.push_back(tj.value);

    const double nJ = static_cast<double>(joint.size());
    const double PTi = std::exp(tj.value / nJ);
    r.value += beta / S * (PTi * ti.value - PTi * tj.value);
    const double wi = beta / S * PTi;
    const double wTi = beta / S * PTi * ((ti.value - tj.value) / nJ - 1.0);
    if (request.theta) r.grad_theta += wi * ti.grad_theta + wTi * tj.grad_theta;
    if (request.latent) {
      r.grad_Z_target += wTi * tj.grad_Z.topRows(nT);
      r.grad_Z_sources.emplace_back(wi * ti.grad_Z + wTi * tj.grad_Z.bottomRows(src.size()));
    }
  }
  if (!std::isfinite(r.value)) throw NumericalError("model objective is not finite");
  return r;
}

double model_objective(const ModelData& data, const HyperParams& theta, const ObjectiveConfig& cfg) {
  return evaluate_model(data, theta, cfg, nullptr, {}).value;
}

Eigen::VectorXd model_gradient_theta(const ModelData& data, const HyperParams& theta, const ObjectiveConfig& cfg) {
  return evaluate_model(data, theta, cfg, nullptr, {.theta = true, .latent = false}).grad_theta;
}

}  // namespace gf
