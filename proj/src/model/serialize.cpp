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

#include "gaussianface/model/serialize.hpp"

#include <fstream>
#include <sstream>

#include "gaussianface/errors.hpp"

namespace gf {

using json_io::Json;

namespace {

Json theta_to_json(const HyperParams& th) {
  return Json{{"theta0", th.theta0}, {"ard", json_io::from_vector(th.ard)}, {"bias", th.bias},
              {"noise_inv", th.noise_inv}};
}

HyperParams theta_from_json(const Json& j, const std::string& path) {
  json_io::check_keys(j, path, {"theta0", "ard", "bias", "noise_inv"});
  HyperParams th;
  json_io::read_number(j, path, "theta0", th.theta0);
  th.ard = json_io::to_vector(json_io::member(j, path, "ard"), json_io::join(path, "ard"));
  json_io::read_number(j, path, "bias", th.bias);
  json_io::read_number(j, path, "noise_inv", th.noise_inv);
  try {
    th.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError("field '" + path + "': " + e.what());
  }
  return th;
}

Json domain_to_json(const DomainData& dom, const Eigen::VectorXd& mean) {
  return Json{{"X", json_io::from_matrix(dom.X)},
              {"y", json_io::from_vector(dom.y)},
              {"Z", json_io::from_matrix(dom.Z)},
              {"mean", json_io::from_vector(mean)}};
}

DomainData domain_from_json(const Json& j, const std::string& path, DomainRole role, Eigen::VectorXd& mean) {
  json_io::check_keys(j, path, {"X", "y", "Z", "mean"});
  DomainData dom;
  dom.role = role;
  dom.X = json_io::to_matrix(json_io::member(j, path, "X"), json_io::join(path, "X"));
  dom.y = json_io::to_vector(json_io::member(j, path, "y"), json_io::join(path, "y"));
  dom.Z = json_io::to_matrix(json_io::member(j, path, "Z"), json_io::join(path, "Z"));
  mean = json_io::to_vector(json_io::member(j, path, "mean"), json_io::join(path, "mean"));
  return dom;
}

Json optional_matrix(const std::optional<Eigen::MatrixXd>& m) {
  return m ? json_io::from_matrix(*m) : Json(nullptr);
}

std::optional<Eigen::MatrixXd> optional_matrix_from(const Json& j, const std::string& path) {
  if (j.is_null()) return std::nullopt;
  return json_io::to_matrix(j, path);
}

}  // namespace

const char* prior_form_name(PriorForm form) {
  return form == PriorForm::kInverseFisher ? "inverse_fisher" : "negative_fisher";
}

PriorForm parse_prior_form(const std::string& name, const std::string& path) {
  if (name == "negative_fisher") return PriorForm::kNegativeFisher;
  if (name == "inverse_fisher") return PriorForm::kInverseFisher;
  throw ConfigError("field '" + path + "': expected \"negative_fisher\" or \"inverse_fisher\"");
}

Json train_config_to_json(const TrainConfig& cfg) {
  const auto& o = cfg.objective;
  return Json{
      {"latent_dim", cfg.latent_dim},
      {"beta", o.beta},
      {"multitask_enabled", o.multitask_enabled},
      {"prior", {{"sigma", o.prior.sigma}, {"lambda", o.prior.lambda}, {"form", prior_form_name(o.prior.form)}}},
      {"anchors",
       {{"threshold", o.anchors.threshold}, {"count", o.anchors.count}, {"tau_scale", o.anchors.tau_scale}}},
      {"scg",
       {{"max_iterations", cfg.scg.max_iterations},
        {"f_tolerance", cfg.scg.f_tolerance},
        {"gradient_tolerance", cfg.scg.gradient_tolerance},
        {"max_rejections", cfg.scg.max_rejections}}},
      {"outer_iterations", cfg.outer_iterations},
      {"outer_tolerance", cfg.outer_tolerance},
      {"seed", cfg.seed},
      {"predictor",
       {{"anchor_threshold", cfg.predictor.anchor_threshold},
        {"anchor_count", cfg.predictor.anchor_count},
        {"seed", cfg.predictor.seed},
        {"laplace",
         {{"gradient_tolerance", cfg.predictor.laplace.gradient_tolerance},
          {"max_iterations", cfg.predictor.laplace.max_iterations},
          {"max_halvings", cfg.predictor.laplace.max_halvings}}}}},
      {"estimate_iterations", cfg.estimate_iterations},
  };
}

void train_config_from_json(const Json& j, const std::string& path, TrainConfig& cfg) {
  using namespace json_io;
  check_keys(j, path,
             {"latent_dim", "beta", "multitask_enabled", "prior", "anchors", "scg", "outer_iterations",
              "outer_tolerance", "seed", "predictor", "estimate_iterations"});
  auto& o = cfg.objective;
  read_int(j, path, "latent_dim", cfg.latent_dim);
  read_number(j, path, "beta", o.beta);
  read_bool(j, path, "multitask_enabled", o.multitask_enabled);
  if (j.contains("prior")) {
    const auto p = join(path, "prior");
    const Json& s = j["prior"];
    check_keys(s, p, {"sigma", "lambda", "form"});
    read_number(s, p, "sigma", o.prior.sigma);
    read_number(s, p, "lambda", o.prior.lambda);
    std::string form = prior_form_name(o.prior.form);
    read_string(s, p, "form", form);
    o.prior.form = parse_prior_form(form, join(p, "form"));
  }
  if (j.contains("anchors")) {
    const auto p = join(path, "anchors");
    const Json& s = j["anchors"];
    check_keys(s, p, {"threshold", "count", "tau_scale"});
    read_int(s, p, "threshold", o.anchors.threshold);
    read_int(s, p, "count", o.anchors.count);
    read_number(s, p, "tau_scale", o.anchors.tau_scale);
  }
  if (j.contains("scg")) {
    const auto p = join(path, "scg");
    const Json& s = j["scg"];
    check_keys(s, p, {"max_iterations", "f_tolerance", "gradient_tolerance", "max_rejections"});
    read_int(s, p, "max_iterations", cfg.scg.max_iterations);
    read_number(s, p, "f_tolerance", cfg.scg.f_tolerance);
    read_number(s, p, "gradient_tolerance", cfg.scg.gradient_tolerance);
    read_int(s, p, "max_rejections", cfg.scg.max_rejections);
  }
  read_int(j, path, "outer_iterations", cfg.outer_iterations);
  read_number(j, path, "outer_tolerance", cfg.outer_tolerance);
  read_u64(j, path, "seed", cfg.seed);
  if (j.contains("predictor")) {
    const auto p = join(path, "predictor");
    const Json& s = j["predictor"];
    check_keys(s, p, {"anchor_threshold", "anchor_count", "seed", "laplace"});
    read_int(s, p, "anchor_threshold", cfg.predictor.anchor_threshold);
    read_int(s, p, "anchor_count", cfg.predictor.anchor_count);
    read_u64(s, p, "seed", cfg.predictor.seed);
    if (s.contains("laplace")) {
      const auto lp = join(p, "laplace");
      const Json& l = s["laplace"];
      check_keys(l, lp, {"gradient_tolerance", "max_iterations", "max_halvings"});
      read_number(l, lp, "gradient_tolerance", cfg.predictor.laplace.gradient_tolerance);
      read_int(l, lp, "max_iterations", cfg.predictor.laplace.max_iterations);
      read_int(l, lp, "max_halvings", cfg.predictor.laplace.max_halvings);
    }
  }
  read_int(j, path, "estimate_iterations", cfg.estimate_iterations);

  auto check = [&](bool ok, const char* field, const char* what) {
    if (!ok) throw ConfigError("field '" + join(path, field) + "': " + what);
  };
  check(cfg.latent_dim >= 1, "latent_dim", "must be at least 1");
  check(o.beta >= 0.0, "beta", "must be non-negative");
  check(o.prior.sigma > 0.0, "prior.sigma", "must be positive");
  check(o.prior.lambda > 0.0, "prior.lambda", "must be positive");
  check(o.anchors.count >= 1, "anchors.count", "must be at least 1");
  check(o.anchors.tau_scale >= 0.0, "anchors.tau_scale", "must be non-negative");
  check(cfg.scg.max_iterations >= 0, "scg.max_iterations", "must be non-negative");
  check(cfg.scg.max_rejections >= 1, "scg.max_rejections", "must be at least 1");
  check(cfg.outer_iterations >= 0, "outer_iterations", "must be non-negative");
  check(cfg.predictor.anchor_count >= 1, "predictor.anchor_count", "must be at least 1");
  check(cfg.predictor.laplace.max_iterations >= 1, "predictor.laplace.max_iterations", "must be at least 1");
  check(cfg.estimate_iterations >= 0, "estimate_iterations", "must be non-negative");
}

Json model_to_json(const TrainedModel& model) {
  Json sources = Json::array();
  for (std::size_t i = 0; i < model.data.sources.size(); ++i) {
    sources.push_back(domain_to_json(model.data.sources[i], model.source_means[i]));
  }
  Json anchor_sources = Json::array();
  for (const auto& a : model.anchors.sources) anchor_sources.push_back(optional_matrix(a));
  Json anchor_joint = Json::array();
  for (const auto& a : model.anchors.joint) anchor_joint.push_back(optional_matrix(a));
  const auto& lap = model.classifier->laplace();
  return Json{
      {"format", "gaussianface-model"},
      {"version", kModelFormatVersion},
      {"config", train_config_to_json(model.config)},
      {"theta", theta_to_json(model.theta)},
      {"target", domain_to_json(model.data.target, model.target_mean)},
      {"sources", sources},
      {"anchors", {{"target", optional_matrix(model.anchors.target)}, {"sources", anchor_sources}, {"joint", anchor_joint}}},
      {"trace", model.trace},
      {"outer_iterations", model.outer_iterations},
      {"converged", model.converged},
      {"laplace",
       {{"alpha", json_io::from_vector(lap.alpha)},
        {"f_hat", json_io::from_vector(lap.f_hat)},
        {"W", json_io::from_vector(lap.W)},
        {"iterations", lap.iterations},
        {"log_marginal", lap.log_marginal}}},
  };
}

TrainedModel model_from_json(const Json& doc) {
  using namespace json_io;
  check_keys(doc, "",
             {"format", "version", "config", "theta", "target", "sources", "anchors", "trace", "outer_iterations",
              "converged", "laplace"});
  std::string format;
  read_string(doc, "", "format", format);
  if (format != "gaussianface-model") throw ConfigError("field 'format': not a gaussianface model document");
  int version = 0;
  read_int(doc, "", "version", version);
  if (version != kModelFormatVersion) {
    throw ConfigError("field 'version': unsupported model format version " + std::to_string(version));
  }

  TrainedModel m;
  train_config_from_json(member(doc, "", "config"), "config", m.config);
  m.theta = theta_from_json(member(doc, "", "theta"), "theta");
  m.data.target = domain_from_json(member(doc, "", "target"), "target", DomainRole::kTarget, m.target_mean);
  const Json& sources = member(doc, "", "sources");
  if (!sources.is_array()) throw ConfigError("field 'sources': expected an array");
  for (std::size_t i = 0; i < sources.size(); ++i) {
    Eigen::VectorXd mean;
    m.data.sources.push_back(
        domain_from_json(sources[i], "sources[" + std::to_string(i) + "]", DomainRole::kSource, mean));
    m.source_means.push_back(std::move(mean));
  }
  try {
    m.data.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError(std::string("model document: ") + e.what());
  }

  const Json& anchors = member(doc, "", "anchors");
  check_keys(anchors, "anchors", {"target", "sources", "joint"});
  m.anchors.target = optional_matrix_from(member(anchors, "anchors", "target"), "anchors.target");
  for (const auto& a : member(anchors, "anchors", "sources")) {
    m.anchors.sources.push_back(optional_matrix_from(a, "anchors.sources"));
  }
  for (const auto& a : member(anchors, "anchors", "joint")) {
    m.anchors.joint.push_back(optional_matrix_from(a, "anchors.joint"));
  }

  const Json& trace = member(doc, "", "trace");
  if (!trace.is_array()) throw ConfigError("field 'trace': expected an array");
  for (const auto& v : trace) {
    if (!v.is_number()) throw ConfigError("field 'trace': expected numbers");
    m.trace.push_back(v.get<double>());
  }
  read_int(doc, "", "outer_iterations", m.outer_iterations);
  read_bool(doc, "", "converged", m.converged);

  const Json& lap = member(doc, "", "laplace");
  check_keys(lap, "laplace", {"alpha", "f_hat", "W", "iterations", "log_marginal"});
  const Eigen::VectorXd alpha = to_vector(member(lap, "laplace", "alpha"), "laplace.alpha");
  int iterations = 0;
  read_int(lap, "laplace", "iterations", iterations);
  if (alpha.size() != m.data.target.size()) throw ConfigError("field 'laplace.alpha': length does not match target");
  m.classifier = std::make_shared<const GpClassifier>(
      GpClassifier::restore(m.data.target.Z, m.data.target.y, m.theta, m.config.predictor, alpha, iterations));
  m.build_regression_cache();
  return m;
}

void save_model(const TrainedModel& model, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << model_to_json(model).dump(1) << '\n';
  if (!out) throw ConfigError("write to '" + path + "' failed");
}

TrainedModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("model file '" + path + "': " + e.what());
  }
  return model_from_json(doc);
}

}  // namespace gf
