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

#include "gaussianface/harness/config.hpp"

#include <cstdio>
#include <fstream>

#include "gaussianface/errors.hpp"
#include "gaussianface/model/serialize.hpp"

namespace gf {

using json_io::Json;

namespace {

Json cluster_to_json(const ClusterOptions& c) {
  return Json{{"step", c.step},
              {"flow_tol", c.flow_tol},
              {"merge_radius", c.merge_radius},
              {"segment_samples", c.segment_samples},
              {"variance_threshold", c.variance_threshold},
              {"max_iterations", c.max_iterations}};
}

void cluster_from_json(const Json& j, const std::string& path, ClusterOptions& c) {
  using namespace json_io;
  check_keys(j, path, {"step", "flow_tol", "merge_radius", "segment_samples", "variance_threshold", "max_iterations"});
  read_number(j, path, "step", c.step);
  read_number(j, path, "flow_tol", c.flow_tol);
  read_number(j, path, "merge_radius", c.merge_radius);
  read_int(j, path, "segment_samples", c.segment_samples);
  read_number(j, path, "variance_threshold", c.variance_threshold);
  read_int(j, path, "max_iterations", c.max_iterations);
  try {
    c.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError("section '" + path + "': " + e.what());
  }
}

Json synth_to_json(const SyntheticDomainSpec& s) {
  return Json{{"n_pairs_matched", s.n_pairs_matched},
              {"n_pairs_mismatched", s.n_pairs_mismatched},
              {"P", s.P},
              {"F", s.F},
              {"d_true", s.d_true},
              {"domain_shift", s.domain_shift},
              {"noise", s.noise},
              {"variation", s.variation},
              {"identity_groups", s.identity_groups},
              {"identities_per_group", s.identities_per_group},
              {"seed", s.seed}};
}

void synth_from_json(const Json& j, const std::string& path, SyntheticDomainSpec& s) {
  using namespace json_io;
  check_keys(j, path,
             {"n_pairs_matched", "n_pairs_mismatched", "P", "F", "d_true", "domain_shift", "noise", "variation",
              "identity_groups", "identities_per_group", "seed"});
  read_int(j, path, "n_pairs_matched", s.n_pairs_matched);
  read_int(j, path, "n_pairs_mismatched", s.n_pairs_mismatched);
  read_int(j, path, "P", s.P);
  read_int(j, path, "F", s.F);
  read_int(j, path, "d_true", s.d_true);
  read_number(j, path, "domain_shift", s.domain_shift);
  read_number(j, path, "noise", s.noise);
  read_number(j, path, "variation", s.variation);
  read_int(j, path, "identity_groups", s.identity_groups);
  read_int(j, path, "identities_per_group", s.identities_per_group);
  read_u64(j, path, "seed", s.seed);
  try {
    s.validate();
  } catch (const ContractViolation& e) {
    throw ConfigError("section '" + path + "': " + e.what());
  }
}

Json pipeline_to_json(const PipelineConfig& p) {
  return Json{{"similarity", similarity_name(p.similarity)},
              {"threshold", p.threshold},
              {"fe_max_points", p.fe_max_points},
              {"fe_seed", p.fe_seed},
              {"fe_use_sources", p.fe_use_sources}};
}

void pipeline_from_json(const Json& j, const std::string& path, PipelineConfig& p) {
  using namespace json_io;
  check_keys(j, path, {"similarity", "threshold", "fe_max_points", "fe_seed", "fe_use_sources"});
  std::string sim = similarity_name(p.similarity);
  read_string(j, path, "similarity", sim);
  try {
    p.similarity = parse_similarity(sim);
  } catch (const ConfigError& e) {
    throw ConfigError("field '" + join(path, "similarity") + "': " + e.what());
  }
  read_number(j, path, "threshold", p.threshold);
  read_int(j, path, "fe_max_points", p.fe_max_points);
  read_u64(j, path, "fe_seed", p.fe_seed);
  read_bool(j, path, "fe_use_sources", p.fe_use_sources);
  if (!(p.threshold >= 0.0 && p.threshold <= 1.0)) {
    throw ConfigError("field '" + join(path, "threshold") + "': must lie in [0, 1]");
  }
  if (p.fe_max_points < 2) throw ConfigError("field '" + join(path, "fe_max_points") + "': must be at least 2");
}

template <typename T>
Json array_of(const std::vector<T>& v) {
  Json out = Json::array();
  for (const auto& x : v) out.push_back(x);
  return out;
}

Json eval_to_json(const EvalConfig& e) {
  return Json{{"folds", e.folds},
              {"seed", e.seed},
              {"sources", e.sources},
              {"select", e.select},
              {"beta_grid", array_of(e.beta_grid)},
              {"sigma_grid", array_of(e.sigma_grid)},
              {"anchor_grid", array_of(e.anchor_grid)},
              {"validation_fraction", e.validation_fraction},
              {"validation_seed", e.validation_seed}};
}

void eval_from_json(const Json& j, const std::string& path, EvalConfig& e) {
  using namespace json_io;
  check_keys(j, path,
             {"folds", "seed", "sources", "select", "beta_grid", "sigma_grid", "anchor_grid", "validation_fraction",
              "validation_seed"});
  read_int(j, path, "folds", e.folds);
  read_u64(j, path, "seed", e.seed);
  read_int(j, path, "sources", e.sources);
  read_bool(j, path, "select", e.select);
  auto grid = [&](const char* key, std::vector<double>& out, bool positive) {
    if (!j.contains(key)) return;
    const auto v = to_vector(j[key], join(path, key));
    out.assign(v.data(), v.data() + v.size());
    for (double x : out) {
      if (positive ? !(x > 0.0) : !(x >= 0.0)) {
        throw ConfigError("field '" + join(path, key) + "': values must be " + (positive ? "positive" : "non-negative"));
      }
    }
  };
  grid("beta_grid", e.beta_grid, false);
  grid("sigma_grid", e.sigma_grid, true);
  if (j.contains("anchor_grid")) {
    std::vector<double> tmp;
    grid("anchor_grid", tmp, true);
    e.anchor_grid.clear();
    for (double x : tmp) {
      if (x != std::floor(x)) throw ConfigError("field '" + join(path, "anchor_grid") + "': values must be integers");
      e.anchor_grid.push_back(static_cast<int>(x));
    }
  }
  read_number(j, path, "validation_fraction", e.validation_fraction);
  read_u64(j, path, "validation_seed", e.validation_seed);
  if (e.folds < 2) throw ConfigError("field '" + join(path, "folds") + "': must be at least 2");
  if (e.sources < 0) throw ConfigError("field '" + join(path, "sources") + "': must be non-negative");
  if (!(e.validation_fraction > 0.0 && e.validation_fraction < 1.0)) {
    throw ConfigError("field '" + join(path, "validation_fraction") + "': must lie in (0, 1)");
  }
  if (e.select && (e.beta_grid.empty() || e.sigma_grid.empty())) {
    throw ConfigError("section '" + path + "': selection needs non-empty beta_grid and sigma_grid");
  }
}

}  // namespace

Json config_to_json(const HarnessConfig& cfg) {
  return Json{{"version", kConfigVersion},
              {"model", train_config_to_json(cfg.model)},
              {"cluster", cluster_to_json(cfg.cluster)},
              {"pipeline", pipeline_to_json(cfg.pipeline)},
              {"synth", synth_to_json(cfg.synth)},
              {"eval", eval_to_json(cfg.eval)}};
}

HarnessConfig config_from_json(const Json& j) {
  using namespace json_io;
  check_keys(j, "", {"version", "model", "cluster", "pipeline", "synth", "eval"});
  int version = 0;
  read_int(j, "", "version", version);
  if (version != kConfigVersion) {
    throw ConfigError("field 'version': expected " + std::to_string(kConfigVersion) + ", got " +
                      std::to_string(version));
  }
  HarnessConfig cfg;
  if (j.contains("model")) train_config_from_json(j["model"], "model", cfg.model);
  if (j.contains("cluster")) cluster_from_json(j["cluster"], "cluster", cfg.cluster);
  if (j.contains("pipeline")) pipeline_from_json(j["pipeline"], "pipeline", cfg.pipeline);
  if (j.contains("synth")) synth_from_json(j["synth"], "synth", cfg.synth);
  if (j.contains("eval")) eval_from_json(j["eval"], "eval", cfg.eval);
  return cfg;
}

HarnessConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  Json j;
  try {
    j = Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ConfigError("config file '" + path + "': " + e.what());
  }
  try {
    return config_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

void save_config(const HarnessConfig& cfg, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  out << config_to_json(cfg).dump(2) << '\n';
}

std::vector<std::string> tunable_paths() {
  std::vector<std::string> out;
  std::function<void(const Json&, const std::string&)> walk = [&](const Json& j, const std::string& prefix) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string p = json_io::join(prefix, it.key());
      if (it->is_object()) {
        walk(*it, p);
      } else if (p != "version") {
        out.push_back(p);
      }
    }
  };
  walk(config_to_json(HarnessConfig{}), "");
  return out;
}

std::string config_hash(const HarnessConfig& cfg) {
  const std::string s = config_to_json(cfg).dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace gf
