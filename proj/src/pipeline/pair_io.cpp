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

#include "gaussianface/pipeline/pair_io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "gaussianface/errors.hpp"

namespace gf {

FacePair FacePair::swapped() const {
  FacePair s = *this;
  std::swap(s.a, s.b);
  std::swap(s.id_a, s.id_b);
  return s;
}

void PairSet::validate() const {
  require(P >= 1 && F >= 1, "pair set needs P >= 1 and F >= 1");
  for (const auto& p : pairs) {
    require(p.a.rows() == P && p.a.cols() == F && p.b.rows() == P && p.b.cols() == F,
            "every pair must hold P x F descriptors for both faces");
    require(p.label == 1 || p.label == -1 || p.label == 0, "pair labels must be +1, -1 or 0");
  }
}

void write_pairs(std::ostream& out, const PairSet& set) {
  set.validate();
  out << "gaussianface-pairs 1\n" << set.pairs.size() << ' ' << set.P << ' ' << set.F << '\n';
  out << std::setprecision(17);
  auto block = [&](const Eigen::MatrixXd& M) {
    for (Eigen::Index r = 0; r < M.rows(); ++r) {
      for (Eigen::Index c = 0; c < M.cols(); ++c) out << (c ? " " : "") << M(r, c);
      out << '\n';
    }
  };
  for (const auto& p : set.pairs) {
    out << p.label << ' ' << p.id_a << ' ' << p.id_b << '\n';
    block(p.a);
    block(p.b);
  }
}

namespace {

class LineReader {
 public:
  LineReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  std::istringstream next() {
    std::string line;
    ++line_;
    if (!std::getline(in_, line)) fail("unexpected end of file");
    return std::istringstream(line);
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError(name_ + ":" + std::to_string(line_) + ": " + what);
  }

 private:
  std::istream& in_;
  std::string name_;
  int line_ = 0;
};

}  // namespace

PairSet read_pairs(std::istream& in, const std::string& name) {
  LineReader rd(in, name);
  {
    auto ls = rd.next();
    std::string magic;
    int version = 0;
    if (!(ls >> magic >> version) || magic != "gaussianface-pairs") rd.fail("not a gaussianface pair file");
    if (version != 1) rd.fail("unsupported pair file version " + std::to_string(version));
  }
  PairSet set;
  long long n = 0;
  {
    auto ls = rd.next();
    if (!(ls >> n >> set.P >> set.F) || n < 0 || set.P < 1 || set.F < 1) rd.fail("expected 'n_pairs P F'");
  }
  set.pairs.reserve(static_cast<std::size_t>(n));
  auto block = [&](Eigen::MatrixXd& M) {
    M.resize(set.P, set.F);
    for (int r = 0; r < set.P; ++r) {
      auto ls = rd.next();
      for (int c = 0; c < set.F; ++c) {
        if (!(ls >> M(r, c))) rd.fail("expected " + std::to_string(set.F) + " feature values");
      }
      std::string extra;
      if (ls >> extra) rd.fail("too many values on the line");
    }
  };
  for (long long i = 0; i < n; ++i) {
    FacePair p;
    {
      auto ls = rd.next();
      if (!(ls >> p.label >> p.id_a >> p.id_b)) rd.fail("expected 'label id_a id_b'");
      if (p.label != 1 && p.label != -1 && p.label != 0) rd.fail("label must be 1, -1 or 0");
    }
    block(p.a);
    block(p.b);
    set.pairs.push_back(std::move(p));
  }
  return set;
}

void save_pairs(const PairSet& set, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  write_pairs(out, set);
  if (!out) throw ConfigError("write to '" + path + "' failed");
}

PairSet load_pairs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open pair file '" + path + "'");
  return read_pairs(in, path);
}

}  // namespace gf
