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

#include "gaussianface/harness/eval.hpp"

#include <cstdint>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <numeric>

#include <boost/math/distributions/students_t.hpp>

#include "gaussianface/errors.hpp"
#include "gaussianface/random.hpp"

namespace gf {

std::vector<int> FoldPlan::members(int fold) const {
  std::vector<int> out;
  for (std::size_t i = 0; i < fold_of_pair.size(); ++i) {
    if (fold_of_pair[i] == fold) out.push_back(static_cast<int>(i));
  }
  return out;
}

FoldPlan make_folds(const PairSet& set, int k, std::uint64_t seed) {
  require(k >= 2, "make_folds: need at least 2 folds");
  require(static_cast<int>(set.pairs.size()) >= k, "make_folds: fewer pairs than folds");
  // Union-find over identity ids.
  std::map<int, int> parent;
  std::function<int(int)> find = [&](int x) {
    auto it = parent.find(x);
    if (it == parent.end()) {
      parent[x] = x;
      return x;
    }
    if (it->second == x) return x;
    const int r = find(it->second);
    parent[x] = r;
    return r;
  };
  for (const auto& p : set.pairs) {
    const int a = find(p.id_a);
    const int b = find(p.id_b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
  std::map<int, std::vector<int>> components;
  for (std::size_t i = 0; i < set.pairs.size(); ++i) {
    components[find(set.pairs[i].id_a)].push_back(static_cast<int>(i));
  }
  if (static_cast<int>(components.size()) < k) {
    throw ContractViolation("make_folds: only " + std::to_string(components.size()) +
                            " identity-disjoint groups for " + std::to_string(k) + " folds");
  }
  std::vector<std::vector<int>> comps;
  for (auto& [root, members] : components) comps.push_back(std::move(members));
  Rng rng(seed);
  for (std::size_t i = comps.size(); i > 1; --i) std::swap(comps[i - 1], comps[rng.below(i)]);
  std::stable_sort(comps.begin(), comps.end(),
                   [](const auto& a, const auto& b) { return a.size() > b.size(); });

  FoldPlan plan;
  plan.k = k;
  plan.fold_of_pair.assign(set.pairs.size(), -1);
  std::vector<std::size_t> load(static_cast<std::size_t>(k), 0);
  for (const auto& c : comps) {
    const auto f = static_cast<int>(std::min_element(load.begin(), load.end()) - load.begin());
    load[static_cast<std::size_t>(f)] += c.size();
    for (int i : c) plan.fold_of_pair[static_cast<std::size_t>(i)] = f;
  }
  return plan;
}

RocCurve roc_curve(const std::vector<double>& scores, const std::vector<int>& labels) {
  require(scores.size() == labels.size(), "roc_curve: scores and labels differ in length");
  std::size_t pos = 0;
  std::size_t neg = 0;
  for (int l : labels) {
    require(l == 1 || l == -1, "roc_curve: labels must be +1 or -1");
    (l == 1 ? pos : neg) += 1;
  }
  require(pos > 0 && neg > 0, "roc_curve: both classes are required");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  RocCurve roc;
  roc.points.push_back({0.0, 0.0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  // Twice the trapezoid area in count units; integer, so the AUC is one rounding.
  std::uint64_t area2 = 0;
  for (std::size_t i = 0; i < order.size();) {
    const double s = scores[order[i]];
    const std::size_t tp0 = tp;
    const std::size_t fp0 = fp;
    while (i < order.size() && scores[order[i]] == s) {
      (labels[order[i]] == 1 ? tp : fp) += 1;
      ++i;
    }
    area2 += static_cast<std::uint64_t>(fp - fp0) * (tp0 + tp);
    roc.points.push_back({static_cast<double>(fp) / static_cast<double>(neg),
                          static_cast<double>(tp) / static_cast<double>(pos)});
  }
  roc.auc = static_cast<double>(area2) / (2.0 * static_cast<double>(pos) * static_cast<double>(neg));
  return roc;
}

std::string roc_csv(const RocCurve& roc) {
  std::string out = "fpr,tpr\n";
  char buf[64];
  for (const auto& p : roc.points) {
    std::snprintf(buf, sizeof buf, "%.6f,%.6f\n", p.fpr, p.tpr);
    out += buf;
  }
  return out;
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double stddev_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

PairedTTest paired_t_test(const std::vector<double>& a, const std::vector<double>& b) {
  require(a.size() == b.size() && a.size() >= 2, "paired_t_test: need two equal-length samples of size >= 2");
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = a[i] - b[i];
  PairedTTest r;
  r.df = static_cast<int>(diff.size()) - 1;
  r.mean_difference = mean_of(diff);
  const double se = stddev_of(diff) / std::sqrt(static_cast<double>(diff.size()));
  if (se == 0.0) {
    r.t = r.mean_difference > 0.0 ? INFINITY : (r.mean_difference < 0.0 ? -INFINITY : 0.0);
    r.p_one_sided = r.mean_difference > 0.0 ? 0.0 : (r.mean_difference < 0.0 ? 1.0 : 0.5);
    return r;
  }
  r.t = r.mean_difference / se;
  const boost::math::students_t dist(static_cast<double>(r.df));
  r.p_one_sided = boost::math::cdf(boost::math::complement(dist, r.t));
  return r;
}

EvalReport kfold_eval(const std::vector<PairSet>& domains, int k, std::uint64_t seed, const FoldScorer& scorer,
                      double threshold) {
  require(!domains.empty(), "kfold_eval: no target domain");
  const auto t0 = std::chrono::steady_clock::now();
  const PairSet& target = domains.front();
  const FoldPlan plan = make_folds(target, k, seed);
  const std::vector<PairSet> sources(domains.begin() + 1, domains.end());

  EvalReport rep;
  rep.sources = static_cast<int>(sources.size());
  rep.scores.assign(target.pairs.size(), 0.0);
  rep.labels.assign(target.pairs.size(), 0);
  for (int f = 0; f < k; ++f) {
    std::vector<FacePair> train;
    std::vector<FacePair> test;
    std::vector<int> test_idx;
    for (std::size_t i = 0; i < target.pairs.size(); ++i) {
      if (plan.fold_of_pair[i] == f) {
        test.push_back(target.pairs[i]);
        test_idx.push_back(static_cast<int>(i));
      } else {
        train.push_back(target.pairs[i]);
      }
    }
    const std::vector<double> s = scorer(train, sources, test);
    require(s.size() == test.size(), "kfold_eval: scorer returned the wrong number of scores");
    std::size_t correct = 0;
    for (std::size_t j = 0; j < test.size(); ++j) {
      const int decision = s[j] >= threshold ? 1 : -1;
      if (decision == test[j].label) ++correct;
      rep.scores[static_cast<std::size_t>(test_idx[j])] = s[j];
      rep.labels[static_cast<std::size_t>(test_idx[j])] = test[j].label;
    }
    rep.fold_accuracy.push_back(static_cast<double>(correct) / static_cast<double>(test.size()));
  }
  rep.mean_accuracy = mean_of(rep.fold_accuracy);
  rep.std_accuracy = stddev_of(rep.fold_accuracy);
  rep.roc = roc_curve(rep.scores, rep.labels);
  rep.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rep;
}

}  // namespace gf
