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

// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Oracles live in this file or in support.hpp.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gaussianface/cluster/gp_cluster.hpp"
#include "gaussianface/core/anchors.hpp"
#include "gaussianface/core/woodbury.hpp"
#include "gaussianface/errors.hpp"
#include "gaussianface/gp/laplace.hpp"
#include "gaussianface/gp/predictor.hpp"
#include "gaussianface/harness/checks.hpp"
#include "gaussianface/harness/config.hpp"
#include "gaussianface/harness/eval.hpp"
#include "gaussianface/harness/experiment.hpp"
#include "gaussianface/harness/synth.hpp"
#include "gaussianface/kfda/kfda.hpp"
#include "gaussianface/model/objective.hpp"
#include "gaussianface/model/serialize.hpp"
#include "gaussianface/model/train.hpp"
#include "support.hpp"

namespace {

using namespace gf;
using Clock = std::chrono::steady_clock;

struct Outcome {
  bool passed = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      passed = false;
      detail << "[failed: " << what << "] ";
    }
  }
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

double phi(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
double Phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// 1. Objective theta gradient against central differences.
void criterion_gradients(const HarnessConfig& cfg, Outcome& out) {
  const auto t0 = Clock::now();
  const double betas[] = {0.0, 0.1, 1.0};
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const GradInstance in = make_grad_instance(1000 + static_cast<std::uint64_t>(t), t % 3, betas[(t / 3) % 3],
                                               cfg.model.objective, 20);
    const Eigen::VectorXd g = model_gradient_theta(in.data, in.theta, in.cfg);
    const double h = 1e-5;
    const Eigen::VectorXd n = testing::central_difference(
        [&](const Eigen::VectorXd& l) { return model_objective(in.data, HyperParams::from_log(l), in.cfg); },
        in.theta.to_log(), h);
    const double f = std::abs(model_objective(in.data, in.theta, in.cfg));
    worst = std::max(worst, testing::max_rel_error(g, n, 1e-9 * std::max(1.0, f) / h));
  }
  const double secs = seconds_since(t0);
  out.require(worst <= 1e-4, "relative error above 1e-4");
  out.require(secs <= 60.0, "runtime above 60 s");
  out.detail << "20 instances, max rel error " << worst << ", " << secs << " s";
}

// Largest generalized eigenvalue of (m m', Sw + lambda I) in the feature
// space of a Cholesky factor of K.
double generalized_eigen_oracle(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, double lambda) {
  const Eigen::Index n = K.rows();
  const Eigen::MatrixXd Phi = K.llt().matrixL();  // rows are feature vectors
  Eigen::VectorXd mp = Eigen::VectorXd::Zero(n), mn = Eigen::VectorXd::Zero(n);
  int np = 0, nn = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (y[i] > 0) {
      mp += Phi.row(i).transpose();
      ++np;
    } else {
      mn += Phi.row(i).transpose();
      ++nn;
    }
  }
  mp /= np;
  mn /= nn;
  Eigen::MatrixXd Sw = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd c = Phi.row(i).transpose() - (y[i] > 0 ? mp : mn);
    Sw += c * c.transpose() / static_cast<double>(y[i] > 0 ? np : nn);
  }
  Sw.diagonal().array() += lambda;
  const Eigen::VectorXd m = mp - mn;
  const Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(m * m.transpose(), Sw);
  return es.eigenvalues().maxCoeff();
}

// 2. KFDA closed form against the eigenproblem.
void criterion_kfda(Outcome& out) {
  Rng rng(2);
  double worst = 0.0;
  for (int t = 0; t < 100; ++t) {
    const int n = 3 + static_cast<int>(rng.below(10));
    const Eigen::MatrixXd K = testing::random_spd(rng, n);
    const Eigen::VectorXd y = testing::random_labels(rng, n);
    const double lambda = 1e-3;
    const double j = kfda_objective(K, build_kfda(y, lambda));
    const double o = generalized_eigen_oracle(K, y, lambda);
    worst = std::max(worst, std::abs(j - o) / o);
  }
  out.require(worst <= 1e-6, "closed form differs from eigen oracle");
  int exact = 0, cases = 0;
  const double lambda = 1e-8;
  for (int np = 1; np <= 5; ++np) {
    for (int nn = 1; nn <= 5; ++nn) {
      Eigen::VectorXd y(np + nn);
      for (int i = 0; i < np + nn; ++i) y[i] = i < np ? 1.0 : -1.0;
      const double j = kfda_objective(Eigen::MatrixXd::Identity(np + nn, np + nn), build_kfda(y, lambda));
      exact += j == (1.0 / lambda) * (1.0 / np + 1.0 / nn);
      ++cases;
    }
  }
  out.require(exact == cases, "K=I case not exact");
  out.detail << "100 kernels, max rel error " << worst << "; K=I exact in " << exact << "/" << cases << " label splits";
}

// Smooth latent set: a jittered grid with observations that are smooth
// functions of the latents.
struct SmoothSet {
  ModelData data;
  HyperParams theta;
};

SmoothSet smooth_set(int n, std::uint64_t seed) {
  Rng rng(seed);
  SmoothSet s;
  DomainData& d = s.data.target;
  d.Z.resize(n, 2);
  d.X.resize(n, 8);
  d.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const double a = rng.uniform(-2.0, 2.0), b = rng.uniform(-2.0, 2.0);
    d.Z(i, 0) = a;
    d.Z(i, 1) = b;
    for (int c = 0; c < 8; ++c) d.X(i, c) = std::sin(0.5 * (c + 1) * a) + std::cos(0.3 * (c + 2) * b) + 0.1 * rng.normal();
    d.y[i] = a + 0.5 * b > 0 ? 1.0 : -1.0;
  }
  s.theta = HyperParams::isotropic(2, 1.0, 0.5, 0.1, 100.0);
  return s;
}

// 3. Low-rank inverses, approximate objective and speed.
void criterion_woodbury(const HarnessConfig& cfg, Outcome& out) {
  Rng rng(3);
  const Eigen::MatrixXd Z = testing::random_matrix(rng, 80, 2);
  const HyperParams th = HyperParams::isotropic(2, 1.0, 1.0, 0.1, 10.0);
  const AnchorApprox a = anchor_approx(Z, Z, th);
  const double s = 0.05;
  Eigen::MatrixXd reg = a.Q * a.Q.transpose();
  reg.diagonal().array() += s;
  const Eigen::MatrixXd reg_inv = reg.llt().solve(Eigen::MatrixXd::Identity(80, 80));
  const double e_reg = (woodbury_reg_inverse(a.Q, s).dense() - reg_inv).norm() / reg_inv.norm();
  Eigen::VectorXd W(80);
  for (int i = 0; i < 80; ++i) W[i] = rng.uniform(0.05, 1.0);
  Eigen::MatrixXd kw = a.Q * a.Q.transpose();
  kw.diagonal() += W.cwiseInverse();
  const Eigen::MatrixXd kw_inv = kw.llt().solve(Eigen::MatrixXd::Identity(80, 80));
  const double e_kw = (woodbury_kw_inverse(a.Q, W).dense() - kw_inv).norm() / kw_inv.norm();
  out.require(e_reg <= 1e-8 && e_kw <= 1e-8, "q=n inverse error above 1e-8");

  ObjectiveConfig ocfg = cfg.model.objective;
  ocfg.beta = 0.0;
  {
    const SmoothSet set = smooth_set(400, 4);
    ocfg.anchors.threshold = 100;
    ocfg.anchors.count = 100;
    const AnchorPlan plan = plan_anchors(set.data, ocfg.anchors, 1);
    const double dense = evaluate_model(set.data, set.theta, ocfg, nullptr, {}).value;
    const double approx = evaluate_model(set.data, set.theta, ocfg, &plan, {}).value;
    const double rel = std::abs(approx - dense) / std::abs(dense);
    out.require(plan.target.has_value() && rel <= 0.01, "q=n/4 objective off by more than 1%");
    out.detail << "q=n inverses " << e_reg << "/" << e_kw << "; q=n/4 objective rel diff " << rel;
  }
  {
    const SmoothSet set = smooth_set(2000, 5);
    ocfg.anchors.threshold = 500;
    ocfg.anchors.count = 100;
    const AnchorPlan plan = plan_anchors(set.data, ocfg.anchors, 1);
    auto time_of = [&](const AnchorPlan* p) {
      double best = 1e300;
      for (int r = 0; r < 3; ++r) {
        const auto t0 = Clock::now();
        (void)evaluate_model(set.data, set.theta, ocfg, p, {});
        best = std::min(best, seconds_since(t0));
      }
      return best;
    };
    const double td = time_of(nullptr);
    const double ta = time_of(&plan);
    out.require(td >= 3.0 * ta, "anchor path less than 3x faster");
    out.detail << "; n=2000 dense " << td << " s vs q=100 " << ta << " s (" << td / ta << "x)";
  }
}

double monte_carlo_mean(const Eigen::MatrixXd& K, const Eigen::VectorXd& y, const Eigen::VectorXd& k_star,
                        std::uint64_t seed, int samples) {
  const Eigen::LLT<Eigen::MatrixXd> llt(K);
  const Eigen::MatrixXd L = llt.matrixL();
  const Eigen::VectorXd w = llt.solve(k_star);
  Rng rng(seed);
  Eigen::VectorXd e(K.rows());
  double num = 0.0, den = 0.0;
  for (int s = 0; s < samples; ++s) {
    for (Eigen::Index i = 0; i < e.size(); ++i) e[i] = rng.normal();
    const Eigen::VectorXd f = L * e;
    double weight = 1.0;
    for (Eigen::Index i = 0; i < f.size(); ++i) weight *= Phi(y[i] * f[i]);
    num += weight * w.dot(f);
    den += weight;
  }
  return num / den;
}

// 4. Laplace mode, Monte Carlo agreement and symmetry.
void criterion_laplace(Outcome& out) {
  Rng rng(4);
  double worst_stat = 0.0;
  for (int t = 0; t < 50; ++t) {
    const int n = 2 + static_cast<int>(rng.below(40));
    const Eigen::MatrixXd Z = testing::random_matrix(rng, n, 2);
    const Eigen::VectorXd y = testing::random_labels(rng, n);
    const HyperParams th =
        HyperParams::isotropic(2, rng.uniform(0.5, 3.0), rng.uniform(0.2, 2.0), 0.05, rng.uniform(2.0, 50.0));
    Eigen::MatrixXd K = kernel_matrix(Z, th);
    K.diagonal().array() += kernel_jitter(th);
    const LaplaceResult r = laplace_mode(K, y);
    Eigen::VectorXd g(n);
    for (int i = 0; i < n; ++i) g[i] = y[i] * phi(y[i] * r.f_hat[i]) / Phi(y[i] * r.f_hat[i]);
    worst_stat = std::max({worst_stat, r.stationarity, (g - K.ldlt().solve(r.f_hat)).cwiseAbs().maxCoeff()});
  }
  out.require(worst_stat <= 1e-8, "stationarity above 1e-8");

  // theta0 = 1/2: for a single observation at unit prior variance the mode
  // and the posterior mean already differ by about 10% analytically.
  double worst_mc = 0.0;
  for (int n = 1; n <= 3; ++n) {
    for (int t = 0; t < 3; ++t) {
      const Eigen::MatrixXd Z = testing::random_matrix(rng, n, 2, 0.7);
      const Eigen::VectorXd y = n == 1 ? Eigen::VectorXd::Ones(1) : testing::random_labels(rng, n);
      const HyperParams th = HyperParams::isotropic(2, 0.5, 0.5, 0.0, 20.0);
      Eigen::MatrixXd K = kernel_matrix(Z, th);
      K.diagonal().array() += kernel_jitter(th);
      const GpClassifier clf = GpClassifier::fit(Z, y, th);
      const Eigen::Vector2d z = Z.row(0).transpose() + Eigen::Vector2d(0.2, -0.1);
      const double mc = monte_carlo_mean(K, y, cross_kernel(Z, z.transpose(), th), 1234, 1000000);
      worst_mc = std::max(worst_mc, std::abs(clf.predict_latent(z).mean - mc) / std::abs(mc));
    }
  }
  out.require(worst_mc <= 0.1, "Monte Carlo disagreement above 10%");

  const Eigen::MatrixXd Z = testing::random_matrix(rng, 25, 2);
  const Eigen::VectorXd y = testing::random_labels(rng, 25);
  const HyperParams th = HyperParams::isotropic(2, 1.5, 0.8, 0.05, 20.0);
  const GpClassifier pos = GpClassifier::fit(Z, y, th);
  const GpClassifier neg = GpClassifier::fit(Z, -y, th);
  double worst_sym = 0.0;
  bool in_range = true;
  for (int q = 0; q < 1000; ++q) {
    const Eigen::Vector2d z(rng.uniform(-4, 4), rng.uniform(-4, 4));
    const double p = pos.predict_prob(z);
    in_range = in_range && p >= 0.0 && p <= 1.0;
    worst_sym = std::max(worst_sym, std::abs(neg.predict_prob(z) - (1.0 - p)));
  }
  out.require(worst_sym <= 1e-8 && in_range, "symmetry or range violated");
  out.detail << "stationarity " << worst_stat << ", MC rel error " << worst_mc << ", symmetry " << worst_sym
             << " over 1000 queries";
}

// 5. Clustering of three blobs.
void criterion_cluster(const HarnessConfig& cfg, Outcome& out) {
  Rng rng(5);
  std::vector<int> truth;
  const Eigen::MatrixXd Z = testing::blobs(rng, {{0.0, 0.0}, {4.0, 0.0}, {2.0, 3.5}}, 15, 0.3, &truth);
  Eigen::VectorXd y(Z.rows());
  for (Eigen::Index i = 0; i < y.size(); ++i) y[i] = truth[static_cast<std::size_t>(i)] == 1 ? -1.0 : 1.0;
  const GpClassifier clf = GpClassifier::fit(Z, y, HyperParams::isotropic(2, 1.0, 1.0, 1e-3, 100.0));
  const ClusterResult r = cluster(Z, clf, cfg.cluster);
  const double ri = testing::rand_index(r.labels, truth);
  bool descent = r.descent_held;
  for (Eigen::Index i = 0; i < Z.rows(); ++i) {
    const FlowResult f = flow_to_equilibrium(Z.row(i).transpose(), clf, cfg.cluster);
    for (std::size_t k = 1; k < f.variance_trace.size(); ++k) descent = descent && f.variance_trace[k] <= f.variance_trace[k - 1];
  }
  const Codebook cb = build_codebook(Z, r.labels, clf);
  const double wsum = std::abs(cb.weights.sum() - 1.0);
  out.require(ri >= 0.95, "Rand index below 0.95");
  out.require(descent, "variance increased on an accepted step");
  out.require(wsum <= 1e-10, "codebook weights do not sum to 1");
  out.detail << r.centers.rows() << " clusters, Rand index " << ri << ", weight sum error " << wsum;
}

// 6. Multi-task gain and the feature combination.
void criterion_trend(const HarnessConfig& cfg, Outcome& out) {
  const auto t0 = Clock::now();
  const std::vector<PairSet> all = gen_domains(cfg.synth, 3);
  const std::vector<PairSet> target_only{all.front()};
  Selection s0, s3, sc;
  const EvalReport r0 = run_evaluation(cfg, target_only, Method::kBc, &s0);
  std::printf("  bc S=0: mean %.4f (sigma %g)\n", r0.mean_accuracy, s0.sigma);
  std::fflush(stdout);
  const EvalReport r3 = run_evaluation(cfg, all, Method::kBc, &s3);
  std::printf("  bc S=3: mean %.4f (beta %g, sigma %g)\n", r3.mean_accuracy, s3.beta, s3.sigma);
  std::fflush(stdout);
  const EvalReport rc = run_evaluation(cfg, target_only, Method::kCombined, &sc);
  std::printf("  combined S=0: mean %.4f (sigma %g)\n", rc.mean_accuracy, sc.sigma);
  const PairedTTest tt = paired_t_test(r3.fold_accuracy, r0.fold_accuracy);
  const double secs = seconds_since(t0);
  const double gain = r3.mean_accuracy - r0.mean_accuracy;
  out.require(gain >= 0.02, "S=3 gain below 2 points");
  out.require(tt.p_one_sided < 0.05, "gain not significant at 0.05");
  out.require(rc.mean_accuracy >= r0.mean_accuracy - 0.01, "combined more than 1 point below BC");
  out.require(secs <= 1800.0, "runtime above 30 min");
  out.detail << "BC S=0 " << r0.mean_accuracy << ", S=3 " << r3.mean_accuracy << " (gain " << gain
             << ", one-sided p " << tt.p_one_sided << "), combined " << rc.mean_accuracy << ", " << secs << " s";
}

DomainData noisy_domain(std::uint64_t seed, int n) {
  Rng rng(seed);
  DomainData d;
  d.X = testing::random_matrix(rng, n, 6);
  d.y = testing::random_labels(rng, n);
  d.X.col(0) += 1.5 * d.y;
  return d;
}

TrainConfig short_training(const HarnessConfig& cfg) {
  TrainConfig t = cfg.model;
  t.scg.max_iterations = 15;
  t.outer_iterations = 3;
  return t;
}

// 7. Reductions.
void criterion_reductions(const HarnessConfig& cfg, Outcome& out) {
  ModelData d;
  d.target = noisy_domain(71, 30);
  d.sources = {noisy_domain(72, 30), noisy_domain(73, 30)};
  TrainConfig on = short_training(cfg);
  on.objective.beta = 0.0;
  TrainConfig off = on;
  off.objective.multitask_enabled = false;
  const TrainedModel a = train(d, on);
  const TrainedModel b = train(d, off);
  bool same = a.theta.to_log() == b.theta.to_log() && a.data.target.Z == b.data.target.Z && a.trace == b.trace;
  Rng rng(7);
  for (int q = 0; q < 50; ++q) {
    const Eigen::VectorXd z = testing::random_matrix(rng, 2, 1, 2.0);
    same = same && a.classifier->predict_prob(z) == b.classifier->predict_prob(z);
  }
  out.require(same, "beta=0 differs from the disabled path");

  bool exact = true;
  for (int t = 0; t < 10; ++t) {
    GradInstance in = make_grad_instance(700 + static_cast<std::uint64_t>(t), 0, 0.5, cfg.model.objective);
    exact = exact && model_objective(in.data, in.theta, in.cfg) == -domain_log_posterior(in.data.target, in.theta, in.cfg);
  }
  out.require(exact, "S=0 objective differs from -l_T");
  out.detail << "beta=0 bitwise " << (same ? "yes" : "no") << ", S=0 exact on 10 instances " << (exact ? "yes" : "no");
}

// 8. Determinism and serialization.
void criterion_determinism(const HarnessConfig& cfg, Outcome& out) {
  ModelData d;
  d.target = noisy_domain(81, 30);
  d.sources = {noisy_domain(82, 25)};
  TrainConfig t = short_training(cfg);
  t.objective.beta = 0.5;
  const TrainedModel a = train(d, t);
  const TrainedModel b = train(d, t);
  const bool same_theta = a.theta.to_log() == b.theta.to_log();
  out.require(same_theta, "theta differs between identical runs");

  const std::string path = "acceptance_model.json";
  save_model(a, path);
  const TrainedModel r = load_model(path);
  std::remove(path.c_str());
  Rng rng(8);
  int mismatches = 0;
  for (int q = 0; q < 200; ++q) {
    const Eigen::VectorXd z = testing::random_matrix(rng, 2, 1, 2.0);
    const LatentPrediction pa = a.classifier->predict_latent(z);
    const LatentPrediction pr = r.classifier->predict_latent(z);
    mismatches += pa.mean != pr.mean || pa.variance != pr.variance ||
                  a.classifier->predict_prob(z) != r.classifier->predict_prob(z);
  }
  for (int q = 0; q < 20; ++q) {
    const Eigen::VectorXd x = testing::random_matrix(rng, 6, 1);
    mismatches += classify_vector(x, a) != classify_vector(x, r);
  }
  out.require(mismatches == 0, "predictions changed after save/load");
  out.detail << "theta bitwise " << (same_theta ? "yes" : "no") << ", " << mismatches
             << " prediction mismatches over 220 queries after round trip";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance checks"};
  std::string config_path;
  std::vector<int> only;
  app.add_option("-c,--config", config_path, "harness config");
  app.add_option("--only", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);

  gf::HarnessConfig cfg;
  try {
    if (!config_path.empty()) cfg = gf::load_config(config_path);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }

  struct Criterion {
    int id;
    const char* name;
    std::function<void(Outcome&)> run;
  };
  const std::vector<Criterion> criteria{
      {1, "gradient suite", [&](Outcome& o) { criterion_gradients(cfg, o); }},
      {2, "KFDA equivalence", [&](Outcome& o) { criterion_kfda(o); }},
      {3, "Woodbury exactness and speed", [&](Outcome& o) { criterion_woodbury(cfg, o); }},
      {4, "Laplace classifier", [&](Outcome& o) { criterion_laplace(o); }},
      {5, "clustering", [&](Outcome& o) { criterion_cluster(cfg, o); }},
      {6, "multi-task trend", [&](Outcome& o) { criterion_trend(cfg, o); }},
      {7, "reductions", [&](Outcome& o) { criterion_reductions(cfg, o); }},
      {8, "determinism and serialization", [&](Outcome& o) { criterion_determinism(cfg, o); }},
  };
  const std::set<int> selected(only.begin(), only.end());
  bool all = true;
  for (const Criterion& c : criteria) {
    if (!selected.empty() && selected.count(c.id) == 0) continue;
    Outcome o;
    try {
      c.run(o);
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail << "[exception: " << e.what() << "]";
    }
    std::printf("%s criterion %d (%s): %s\n", o.passed ? "PASS" : "FAIL", c.id, c.name, o.detail.str().c_str());
    std::fflush(stdout);
    all = all && o.passed;
  }
  return all ? 0 : 1;
}
