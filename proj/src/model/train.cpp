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

#include "gaussianface/model/train.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gaussianface/errors.hpp"

namespace gf {

namespace {

Eigen::VectorXd center_rows(Eigen::MatrixXd& X) {
  Eigen::VectorXd mean = X.colwise().mean().transpose();
  X.rowwise() -= mean.transpose();
  return mean;
}

Eigen::VectorXd pack_latents(const ModelData& data, bool with_sources) {
  Eigen::Index total = data.target.Z.size();
  if (with_sources) {
    for (const auto& s : data.sources) total += s.Z.size();
  }
  Eigen::VectorXd v(total);
  Eigen::Index off = 0;
  auto put = [&](const Eigen::MatrixXd& Z) {
    v.segment(off, Z.size()) = Eigen::Map<const Eigen::VectorXd>(Z.data(), Z.size());
    off += Z.size();
  };
  put(data.target.Z);
  if (with_sources) {
    for (const auto& s : data.sources) put(s.Z);
  }
  return v;
}

void unpack_latents(const Eigen::VectorXd& v, ModelData& data, bool with_sources) {
  Eigen::Index off = 0;
  auto get = [&](Eigen::MatrixXd& Z) {
    Eigen::Map<Eigen::VectorXd>(Z.data(), Z.size()) = v.segment(off, Z.size());
    off += Z.size();
  };
  get(data.target.Z);
  if (with_sources) {
    for (auto& s : data.sources) get(s.Z);
  }
}

// Objective wrapper that turns numerical failures at trial points into +inf
// so SCG rejects the step instead of aborting.
template <typename Fn>
double guarded(Eigen::VectorXd* grad, Fn&& fn) {
  try {
    return fn();
  } catch (const NumericalError&) {
    if (grad != nullptr) grad->setConstant(std::numeric_limits<double>::quiet_NaN());
    return std::numeric_limits<double>::infinity();
  }
}

bool representable(const HyperParams& th) {
  auto ok = [](double v) { return std::isfinite(v) && v > 0.0; };
  return ok(th.theta0) && ok(th.noise_inv) && std::isfinite(th.bias) &&
         th.ard.unaryExpr([&](double v) { return ok(v) ? 1.0 : 0.0; }).minCoeff() > 0.0;
}

}  // namespace

Eigen::MatrixXd pca_latents(const Eigen::MatrixXd& X_centered, int d) {
  require(d >= 1 && d <= X_centered.cols(), "latent dimension must satisfy 1 <= d <= D");
  const auto n = X_centered.rows();
  const auto D = X_centered.cols();
  // Principal directions from whichever Gram matrix is smaller.
  Eigen::MatrixXd V(D, d);
  if (D <= n) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X_centered.transpose() * X_centered);
    if (es.info() != Eigen::Success) throw NumericalError("PCA eigendecomposition failed");
    for (int j = 0; j < d; ++j) V.col(j) = es.eigenvectors().col(D - 1 - j);
  } else {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X_centered * X_centered.transpose());
    if (es.info() != Eigen::Success) throw NumericalError("PCA eigendecomposition failed");
    for (int j = 0; j < d; ++j) {
      const Eigen::Index c = n - 1 - j;
      const double lambda = c >= 0 ? es.eigenvalues()[c] : 0.0;
      if (c >= 0 && lambda > 0.0) {
        V.col(j) = X_centered.transpose() * es.eigenvectors().col(c) / std::sqrt(lambda);
      } else {
        V.col(j).setZero();
        V(j % D, j) = 1.0;
      }
    }
  }
  for (int j = 0; j < d; ++j) {
    Eigen::Index arg = 0;
    V.col(j).cwiseAbs().maxCoeff(&arg);
    if (V(arg, j) < 0.0) V.col(j) = -V.col(j);
  }
  return X_centered * V;
}

HyperParams initial_theta(const Eigen::MatrixXd& X_centered, const Eigen::MatrixXd& Z) {
  const double n = static_cast<double>(std::max<Eigen::Index>(X_centered.rows() - 1, 1));
  double theta0 = X_centered.squaredNorm() / (n * static_cast<double>(X_centered.cols()));
  if (!(theta0 > 0.0) || !std::isfinite(theta0)) theta0 = 1.0;
  HyperParams th;
  th.theta0 = theta0;
  th.ard.resize(Z.cols());
  for (Eigen::Index m = 0; m < Z.cols(); ++m) {
    const double var = (Z.col(m).array() - Z.col(m).mean()).square().sum() / n;
    th.ard[m] = var > 1e-12 ? 1.0 / var : 1.0;
  }
  th.bias = 1e-3 * theta0;
  th.noise_inv = 1.0 / (0.1 * theta0);
  return th;
}

void TrainedModel::build_regression_cache() {
  const auto& Z = data.target.Z;
  if (anchors.target) {
    regression = std::make_shared<const KernelOperator>(
        KernelOperator::low_rank(Z, *anchors.target, theta, config.objective.anchors.tau_scale));
  } else {
    regression = std::make_shared<const KernelOperator>(KernelOperator::dense(Z, theta));
  }
  regression_weights = regression->solve(data.target.X);
}

TrainedModel train(const ModelData& domains, const TrainConfig& cfg) {
  require(cfg.outer_iterations >= 0, "outer iteration cap must be non-negative");
  TrainedModel model;
  model.config = cfg;
  model.data = domains;
  const bool with_sources = multitask_active(domains, cfg.objective);
  if (!with_sources) model.data.sources.clear();

  model.target_mean = center_rows(model.data.target.X);
  model.data.target.Z = pca_latents(model.data.target.X, cfg.latent_dim);
  model.data.target.role = DomainRole::kTarget;
  for (auto& s : model.data.sources) {
    model.source_means.push_back(center_rows(s.X));
    s.Z = pca_latents(s.X, cfg.latent_dim);
    s.role = DomainRole::kSource;
  }
  model.data.validate();
  model.theta = initial_theta(model.data.target.X, model.data.target.Z);
  model.anchors = plan_anchors(model.data, cfg.objective.anchors, cfg.seed);

  const ObjectiveConfig& ocfg = cfg.objective;
  const AnchorPlan* plan = &model.anchors;
  double f = evaluate_model(model.data, model.theta, ocfg, plan, {}).value;
  model.trace.push_back(f);

  bool failed = false;
  for (int outer = 1; outer <= cfg.outer_iterations; ++outer) {
    model.outer_iterations = outer;
    const double f_start = f;
    try {
      // Kernel parameters with latents fixed.
      const ScgObjective theta_obj = [&](const Eigen::VectorXd& lt, Eigen::VectorXd* grad) {
        return guarded(grad, [&] {
          const HyperParams th = HyperParams::from_log(lt);
          // exp() under- or overflowed: not a usable kernel.
          if (!representable(th)) throw NumericalError("kernel parameters out of floating-point range");
          auto r = evaluate_model(model.data, th, ocfg, plan, {.theta = grad != nullptr, .latent = false});
          if (grad != nullptr) *grad = r.grad_theta;
          return r.value;
        });
      };
      const ScgResult rt = scg_minimize(theta_obj, model.theta.to_log(), cfg.scg);
      if (rt.f < f) {
        model.theta = HyperParams::from_log(rt.x);
        f = rt.f;
      }

      // Latents with kernel parameters fixed.
      ModelData work = model.data;
      const ScgObjective latent_obj = [&](const Eigen::VectorXd& zv, Eigen::VectorXd* grad) {
        return guarded(grad, [&] {
          unpack_latents(zv, work, with_sources);
          auto r = evaluate_model(work, model.theta, ocfg, plan, {.theta = false, .latent = grad != nullptr});
          if (grad != nullptr) {
            ModelData g = work;
            g.target.Z = r.grad_Z_target;
            for (std::size_t i = 0; i < g.sources.size() && with_sources; ++i) g.sources[i].Z = r.grad_Z_sources[i];
            *grad = pack_latents(g, with_sources);
          }
          return r.value;
        });
      };
      const ScgResult rz = scg_minimize(latent_obj, pack_latents(model.data, with_sources), cfg.scg);
      if (rz.f < f) {
        unpack_latents(rz.x, model.data, with_sources);
        f = rz.f;
      }
    } catch (const NumericalError& e) {
      warn(std::string("training stopped early: ") + e.what());
      failed = true;
    }
    model.trace.push_back(f);
    if (failed) break;
    if (f_start - f <= cfg.outer_tolerance * std::abs(f_start)) {
      model.converged = true;
      break;
    }
  }

  model.classifier = std::make_shared<const GpClassifier>(
      GpClassifier::fit(model.data.target.Z, model.data.target.y, model.theta, cfg.predictor));
  model.build_regression_cache();
  return model;
}

double latent_log_density(const TrainedModel& model, const Eigen::VectorXd& x_centered, const Eigen::VectorXd& z,
                          Eigen::VectorXd* grad) {
  const auto& Z = model.data.target.Z;
  const auto& th = model.theta;
  const double D = static_cast<double>(x_centered.size());
  Eigen::VectorXd k(Z.rows());
  kernel_row(Z, z, th, k);
  const Eigen::VectorXd Kik = model.regression->solve(k);
  const Eigen::VectorXd mu = model.regression_weights.transpose() * k;
  const double v = th.prior_variance() - k.dot(Kik);
  if (!(v > 0.0)) return -std::numeric_limits<double>::infinity();
  const Eigen::VectorXd resid = x_centered - mu;
  const double r2 = resid.squaredNorm();
  const double logp = -0.5 * D * std::log(2.0 * std::numbers::pi * v) - 0.5 * r2 / v;
  if (grad != nullptr) {
    const Eigen::MatrixXd J = kernel_row_jacobian(Z, z, th);
    const Eigen::VectorXd dv = -2.0 * J.transpose() * Kik;
    const Eigen::VectorXd dmu_resid = J.transpose() * (model.regression_weights * resid);
    *grad = (-0.5 * D / v + 0.5 * r2 / (v * v)) * dv + dmu_resid / v;
  }
  return logp;
}

LatentEstimate estimate_latent(const Eigen::VectorXd& x_star, const TrainedModel& model) {
  const auto& X = model.data.target.X;
  require(x_star.size() == X.cols(), "estimate_latent: observation dimension mismatch");
  const Eigen::VectorXd x = x_star - model.target_mean;
  Eigen::Index nearest = 0;
  (X.rowwise() - x.transpose()).rowwise().squaredNorm().minCoeff(&nearest);

  LatentEstimate est;
  est.nearest_index = static_cast<int>(nearest);
  est.z = model.data.target.Z.row(nearest).transpose();
  est.initial_log_density = latent_log_density(model, x, est.z);
  est.log_density = est.initial_log_density;
  if (!std::isfinite(est.initial_log_density)) {
    est.optimizer_failed = true;
    return est;
  }
  const ScgObjective obj = [&](const Eigen::VectorXd& z, Eigen::VectorXd* grad) {
    const double lp = latent_log_density(model, x, z, grad);
    if (grad != nullptr) {
      if (std::isfinite(lp)) {
        *grad = -*grad;
      } else {
        grad->setConstant(z.size(), std::numeric_limits<double>::quiet_NaN());
      }
    }
    return -lp;
  };
  ScgOptions opts = model.config.scg;
  opts.max_iterations = model.config.estimate_iterations;
  try {
    const ScgResult r = scg_minimize(obj, est.z, opts);
    if (-r.f >= est.initial_log_density) {
      est.z = r.x;
      est.log_density = -r.f;
    }
  } catch (const NumericalError&) {
    est.optimizer_failed = true;
  }
  return est;
}

}  // namespace gf
