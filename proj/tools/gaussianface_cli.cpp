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

// Command-line front end: synth | train | eval | extract | cluster | gradcheck | selfcheck.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gaussianface/errors.hpp"
#include "gaussianface/harness/checks.hpp"
#include "gaussianface/harness/config.hpp"
#include "gaussianface/harness/eval.hpp"
#include "gaussianface/harness/experiment.hpp"
#include "gaussianface/harness/synth.hpp"
#include "gaussianface/model/serialize.hpp"
#include "gaussianface/pipeline/pair_io.hpp"

namespace {

enum ExitCode { kOk = 0, kUsage = 1, kNumerical = 2, kCheckFailed = 3 };

gf::HarnessConfig config_or_default(const std::string& path) {
  return path.empty() ? gf::HarnessConfig{} : gf::load_config(path);
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw gf::ConfigError("cannot write '" + path + "'");
  out << text;
  if (!out) throw gf::ConfigError("write failed for '" + path + "'");
}

std::vector<gf::PairSet> load_sources(const std::vector<std::string>& paths) {
  std::vector<gf::PairSet> out;
  for (const auto& p : paths) out.push_back(gf::load_pairs(p));
  return out;
}

double bc_accuracy(const gf::BcModel& bc, const std::vector<gf::FacePair>& pairs, double threshold) {
  int correct = 0;
  int total = 0;
  for (const auto& p : pairs) {
    if (p.label == 0) continue;
    correct += static_cast<int>(gf::verify_bc(p, bc, threshold).decision == p.label);
    ++total;
  }
  if (total == 0) throw gf::ContractViolation("no labeled pairs to score");
  return static_cast<double>(correct) / total;
}

int print_report(const gf::CheckReport& report) {
  for (const auto& r : report.results) {
    std::printf("%s %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
  }
  return report.all_passed() ? kOk : kCheckFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"GaussianFace face verification toolkit"};
  app.require_subcommand(1);
  std::string config_path;
  app.add_option("-c,--config", config_path, "JSON config (defaults when omitted)");
  bool quiet = false;
  app.add_flag("-q,--quiet", quiet, "suppress warnings");

  auto* synth = app.add_subcommand("synth", "write synthetic target and source pair files");
  std::string synth_dir = ".";
  int synth_sources = -1;
  synth->add_option("-o,--out-dir", synth_dir, "output directory");
  synth->add_option("-s,--sources", synth_sources, "source count (default eval.sources)");

  auto* train = app.add_subcommand("train", "train a model and write the model document");
  std::string train_data;
  std::vector<std::string> train_sources;
  std::string train_out;
  std::string train_mode = "bc";
  std::string train_validate;
  train->add_option("-d,--data", train_data, "target pair file")->required();
  train->add_option("--source", train_sources, "source pair files");
  train->add_option("-o,--out", train_out, "model document")->required();
  train->add_option("-m,--mode", train_mode, "bc or fe")->check(CLI::IsMember({"bc", "fe"}));
  train->add_option("--validate", train_validate, "pair file to report accuracy on (bc mode)");

  auto* eval = app.add_subcommand("eval", "k-fold evaluation, or scoring of a trained model");
  std::string eval_data;
  std::vector<std::string> eval_sources;
  std::string eval_method = "bc";
  std::string eval_model;
  std::string eval_report;
  std::string eval_roc;
  int eval_S = -1;
  eval->add_option("-d,--data", eval_data, "target pair file (default: synthetic from config)");
  eval->add_option("--source", eval_sources, "source pair files");
  eval->add_option("-s,--sources", eval_S, "synthetic source count (default eval.sources)");
  eval->add_option("-m,--method", eval_method, "bc or combined")->check(CLI::IsMember({"bc", "combined"}));
  eval->add_option("--model", eval_model, "score this bc model on --data instead of cross-validating");
  eval->add_option("-r,--report", eval_report, "report JSON path");
  eval->add_option("--roc", eval_roc, "ROC CSV path");

  auto* extract = app.add_subcommand("extract", "codebook features of every pair, as CSV");
  std::string ex_model;
  std::string ex_data;
  std::string ex_out;
  extract->add_option("--model", ex_model, "fe model document")->required();
  extract->add_option("-d,--data", ex_data, "pair file")->required();
  extract->add_option("-o,--out", ex_out, "CSV path")->required();

  auto* clus = app.add_subcommand("cluster", "cluster a model's latents and write the codebook");
  std::string cl_model;
  std::string cl_out;
  clus->add_option("--model", cl_model, "model document")->required();
  clus->add_option("-o,--out", cl_out, "JSON path")->required();

  auto* gradcheck = app.add_subcommand("gradcheck", "finite-difference gradient suites");
  gf::GradcheckOptions gc_opts;
  gradcheck->add_option("--instances", gc_opts.instances, "seeded objective instances");
  gradcheck->add_option("--seed", gc_opts.seed, "seed");

  auto* selfcheck = app.add_subcommand("selfcheck", "oracle battery");
  std::uint64_t sc_seed = 1;
  selfcheck->add_option("--seed", sc_seed, "seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }
  if (quiet) gf::set_warnings_enabled(false);

  try {
    const gf::HarnessConfig cfg = config_or_default(config_path);

    if (*synth) {
      const int S = synth_sources >= 0 ? synth_sources : cfg.eval.sources;
      const auto domains = gf::gen_domains(cfg.synth, S);
      std::filesystem::create_directories(synth_dir);
      for (std::size_t i = 0; i < domains.size(); ++i) {
        const std::string name = i == 0 ? "target.pairs" : "source" + std::to_string(i) + ".pairs";
        const std::string path = (std::filesystem::path(synth_dir) / name).string();
        gf::save_pairs(domains[i], path);
        std::printf("wrote %s (%zu pairs)\n", path.c_str(), domains[i].pairs.size());
      }
      return kOk;
    }

    if (*train) {
      const gf::PairSet data = gf::load_pairs(train_data);
      const auto sources = load_sources(train_sources);
      if (train_mode == "bc") {
        const gf::BcModel bc = gf::train_bc(data.pairs, sources, cfg);
        gf::save_model(bc.model, train_out);
        std::printf("trained bc model: objective %.17g, %d outer iterations\n", bc.model.trace.back(),
                    bc.model.outer_iterations);
        if (!train_validate.empty()) {
          const gf::PairSet val = gf::load_pairs(train_validate);
          std::printf("validation accuracy %.17g\n", bc_accuracy(bc, val.pairs, cfg.pipeline.threshold));
        }
      } else {
        const gf::FeModel fe = gf::train_fe(data.pairs, sources, cfg);
        gf::save_model(fe.model, train_out);
        std::printf("trained fe model: objective %.17g, %d codewords\n", fe.model.trace.back(), fe.codebook.size());
      }
      return kOk;
    }

    if (*eval) {
      if (!eval_model.empty()) {
        if (eval_data.empty()) throw gf::ConfigError("eval --model needs --data");
        gf::BcModel bc;
        bc.model = gf::load_model(eval_model);
        bc.similarity = cfg.pipeline.similarity;
        const gf::PairSet val = gf::load_pairs(eval_data);
        std::printf("validation accuracy %.17g\n", bc_accuracy(bc, val.pairs, cfg.pipeline.threshold));
        return kOk;
      }
      std::vector<gf::PairSet> domains;
      if (!eval_data.empty()) {
        domains.push_back(gf::load_pairs(eval_data));
        for (auto& s : load_sources(eval_sources)) domains.push_back(std::move(s));
      } else {
        domains = gf::gen_domains(cfg.synth, eval_S >= 0 ? eval_S : cfg.eval.sources);
      }
      gf::Selection chosen;
      const gf::EvalReport rep = gf::run_evaluation(cfg, domains, gf::parse_method(eval_method), &chosen);
      const std::string json = gf::report_to_json(rep, cfg.eval.select ? &chosen : nullptr).dump(2) + "\n";
      if (!eval_report.empty()) write_text(eval_report, json);
      if (!eval_roc.empty()) write_text(eval_roc, gf::roc_csv(rep.roc));
      std::printf("%s S=%d: accuracy %.4f +- %.4f, AUC %.4f, %.1f s\n", rep.method.c_str(), rep.sources,
                  rep.mean_accuracy, rep.std_accuracy, rep.roc.auc, rep.runtime_seconds);
      return kOk;
    }

    if (*extract) {
      const gf::FeModel fe = gf::build_fe_model(gf::load_model(ex_model), cfg.cluster);
      const gf::PairSet data = gf::load_pairs(ex_data);
      std::ofstream out(ex_out);
      if (!out) throw gf::ConfigError("cannot write '" + ex_out + "'");
      out.precision(17);
      for (const auto& p : data.pairs) {
        const Eigen::VectorXd f = gf::extract_features(p, fe);
        out << p.label;
        for (Eigen::Index i = 0; i < f.size(); ++i) out << ',' << f[i];
        out << '\n';
      }
      std::printf("wrote %zu feature rows to %s\n", data.pairs.size(), ex_out.c_str());
      return kOk;
    }

    if (*clus) {
      const gf::TrainedModel model = gf::load_model(cl_model);
      const gf::ClusterResult cr = gf::cluster(model.data.target.Z, *model.classifier, cfg.cluster);
      const gf::Codebook cb = gf::build_codebook(model.data.target.Z, cr.labels, *model.classifier);
      gf::json_io::Json doc;
      doc["labels"] = cr.labels;
      doc["centers"] = gf::json_io::from_matrix(cb.centers);
      doc["spreads"] = gf::json_io::from_matrix(cb.spreads);
      doc["weights"] = gf::json_io::from_vector(cb.weights);
      doc["probs"] = gf::json_io::from_vector(cb.probs);
      doc["variances"] = gf::json_io::from_vector(cb.variances);
      doc["variance_threshold"] = cr.variance_threshold;
      doc["merge_radius"] = cr.merge_radius;
      write_text(cl_out, doc.dump(2) + "\n");
      std::printf("%d clusters from %lld equilibria\n", cb.size(), static_cast<long long>(cr.equilibria.rows()));
      return kOk;
    }

    if (*gradcheck) return print_report(gf::run_gradcheck(cfg.model.objective, gc_opts));
    if (*selfcheck) return print_report(gf::run_selfcheck(sc_seed));
  } catch (const gf::ConfigError& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const gf::ContractViolation& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  } catch (const gf::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kUsage;
  }
  return kUsage;
}
