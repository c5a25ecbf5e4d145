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

#include "gaussianface/harness/experiment.hpp"

#include <algorithm>
#include <cmath>

#include "gaussianface/errors.hpp"

namespace gf {

const char* method_name(Method m) { return m == Method::kCombined ? "combined" : "bc"; }

Method parse_method(const std::string& name) {
  if (name == "bc") return Method::kBc;
  if (name == "combined") return Method::kCombined;
  throw ConfigError("unknown method '" + name + "' (expected bc or combined)");
}

ModelData bc_model_data(const std::vector<FacePair>& train, const std::vector<PairSet>& sources, Similarity kind) {
  ModelData data;
  data.target = bc_domain(train, kind);
  data.target.role = DomainRole::kTarget;
  for (const auto& s : sources) {
    DomainData d = bc_domain(s.pairs, kind);
    d.role = DomainRole::kSource;
    data.sources.push_back(std::move(d));
  }
  return data;
}

BcModel train_bc(const std::vector<FacePair>& pairs, const std::vector<PairSet>& sources, const HarnessConfig& cfg) {
  BcModel bc;
  bc.similarity = cfg.pipeline.similarity;
  bc.model = gf::train(bc_model_data(pairs, sources, bc.similarity), cfg.model);
  return bc;
}

FeModel train_fe(const std::vector<FacePair>& pairs, const std::vector<PairSet>& sources, const HarnessConfig& cfg) {
  ModelData data;
  data.target = fe_domain(subsample(build_fe_training_set(pairs), cfg.pipeline.fe_max_points, cfg.pipeline.fe_seed));
  if (cfg.pipeline.fe_use_sources) {
    std::uint64_t salt = 1;
    for (const auto& s : sources) {
      DomainData d = fe_domain(
          subsample(build_fe_training_set(s.pairs), cfg.pipeline.fe_max_points, cfg.pipeline.fe_seed + salt++));
      d.role = DomainRole::kSource;
      data.sources.push_back(std::move(d));
    }
  }
  return build_fe_model(gf::train(data, cfg.model), cfg.cluster);
}

CombinedModel train_combined(const std::vector<FacePair>& pairs, const std::vector<PairSet>& sources,
                             const HarnessConfig& cfg) {
  CombinedModel cm;
  cm.fe = train_fe(pairs, sources, cfg);
  std::vector<const FacePair*> labeled;
  for (const auto& p : pairs) {
    if (p.label != 0) labeled.push_back(&p);
  }
  require(!labeled.empty(), "train_combined: no labeled pairs");
  ModelData data;
  const Eigen::VectorXd first = extract_features(*labeled.front(), cm.fe);
  const auto n = static_cast<Eigen::Index>(labeled.size());
  Eigen::MatrixXd X(n, first.size());
  data.target.y.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    X.row(i) = (i == 0 ? first : extract_features(*labeled[static_cast<std::size_t>(i)], cm.fe)).transpose();
    data.target.y[i] = labeled[static_cast<std::size_t>(i)]->label;
  }
  cm.scaler = FeatureScaler::fit(X);
  data.target.X = cm.scaler.apply_rows(X);
  TrainConfig bc_cfg = cfg.model;
  bc_cfg.latent_dim = std::min<int>(bc_cfg.latent_dim, static_cast<int>(first.size()));
  cm.bc = gf::train(data, bc_cfg);
  return cm;
}

FoldScorer make_scorer(Method method, const HarnessConfig& cfg) {
  if (method == Method::kBc) {
    return [cfg](const std::vector<FacePair>& tr, const std::vector<PairSet>& sources,
                 const std::vector<FacePair>& test) {
      const BcModel bc = train_bc(tr, sources, cfg);
      std::vector<double> scores;
      scores.reserve(test.size());
      for (const auto& p : test) scores.push_back(verify_bc(p, bc, cfg.pipeline.threshold).probability);
      return scores;
    };
  }
  return [cfg](const std::vector<FacePair>& tr, const std::vector<PairSet>& sources,
               const std::vector<FacePair>& test) {
    const CombinedModel cm = train_combined(tr, sources, cfg);
    std::vector<double> scores;
    scores.reserve(test.size());
    for (const auto& p : test) scores.push_back(verify_combined(p, cm, cfg.pipeline.threshold).probability);
    return scores;
  };
}

namespace {

double holdout_accuracy(const HarnessConfig& cfg, Method method, const std::vector<PairSet>& domains) {
  const PairSet& target = domains.front();
  const int k = std::max(2, static_cast<int>(std::lround(1.0 / cfg.eval.validation_fraction)));
  const FoldPlan plan = make_folds(target, k, cfg.eval.validation_seed);
  std::vector<FacePair> tr;
  std::vector<FacePair> te;
  for (std::size_t i = 0; i < target.pairs.size(); ++i) {
    (plan.fold_of_pair[i] == 0 ? te : tr).push_back(target.pairs[i]);
  }
  const std::vector<PairSet> sources(domains.begin() + 1, domains.end());
  const auto scores = make_scorer(method, cfg)(tr, sources, te);
  std::size_t correct = 0;
  for (std::size_t j = 0; j < te.size(); ++j) {
    if ((scores[j] >= cfg.pipeline.threshold ? 1 : -1) == te[j].label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(te.size());
}

}  // namespace

Selection select_hyperparameters(const HarnessConfig& cfg, Method method, int sources) {
  SyntheticDomainSpec vspec = cfg.synth;
  vspec.seed = cfg.eval.validation_seed;
  const auto domains = gen_domains(vspec, sources);

  Selection best;
  best.accuracy = -1.0;
  best.anchors = cfg.model.objective.anchors.count;
  // Without sources beta has no effect, so only sigma is searched.
  const std::vector<double> betas = sources > 0 ? cfg.eval.beta_grid : std::vector<double>{cfg.model.objective.beta};
  for (double sigma : cfg.eval.sigma_grid) {
    for (double beta : betas) {
      HarnessConfig c = cfg;
      c.model.objective.prior.sigma = sigma;
      c.model.objective.beta = beta;
      double acc = -1.0;
      try {
        acc = holdout_accuracy(c, method, domains);
      } catch (const NumericalError& e) {
        warn(std::string("selection: sigma/beta candidate failed: ") + e.what());
      }
      if (acc > best.accuracy) {
        best.accuracy = acc;
        best.sigma = sigma;
        best.beta = beta;
      }
    }
  }
  for (int q : cfg.eval.anchor_grid) {
    HarnessConfig c = cfg;
    c.model.objective.prior.sigma = best.sigma;
    c.model.objective.beta = best.beta;
    c.model.objective.anchors.count = q;
    c.model.predictor.anchor_count = q;
    double acc = -1.0;
    try {
      acc = holdout_accuracy(c, method, domains);
    } catch (const NumericalError& e) {
      warn(std::string("selection: anchor candidate failed: ") + e.what());
    }
    if (acc > best.accuracy) {
      best.accuracy = acc;
      best.anchors = q;
    }
  }
  if (best.accuracy < 0.0) throw NumericalError("selection: every candidate failed");
  return best;
}

EvalReport run_evaluation(HarnessConfig cfg, const std::vector<PairSet>& domains, Method method, Selection* chosen) {
  require(!domains.empty(), "run_evaluation: no target domain");
  const int S = static_cast<int>(domains.size()) - 1;
  Selection sel;
  sel.beta = cfg.model.objective.beta;
  sel.sigma = cfg.model.objective.prior.sigma;
  sel.anchors = cfg.model.objective.anchors.count;
  if (cfg.eval.select) {
    sel = select_hyperparameters(cfg, method, S);
    cfg.model.objective.beta = sel.beta;
    cfg.model.objective.prior.sigma = sel.sigma;
    cfg.model.objective.anchors.count = sel.anchors;
    cfg.model.predictor.anchor_count = sel.anchors;
  }
  if (chosen != nullptr) *chosen = sel;
  EvalReport rep = kfold_eval(domains, cfg.eval.folds, cfg.eval.seed, make_scorer(method, cfg), cfg.pipeline.threshold);
  rep.method = method_name(method);
  rep.config_hash = config_hash(cfg);
  return rep;
}

json_io::Json report_to_json(const EvalReport& rep, const Selection* chosen) {
  json_io::Json j{{"method", rep.method},
                  {"sources", rep.sources},
                  {"fold_accuracy", rep.fold_accuracy},
                  {"mean_accuracy", rep.mean_accuracy},
                  {"std_accuracy", rep.std_accuracy},
                  {"auc", rep.roc.auc},
                  {"config_hash", rep.config_hash}};
  if (chosen != nullptr) {
    j["selected"] = {{"beta", chosen->beta}, {"sigma", chosen->sigma}, {"anchors", chosen->anchors},
                     {"validation_accuracy", chosen->accuracy}};
  }
  return j;
}

}  // namespace gf
