// Copyright 2026 The oversmooth Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <string>

#include <json.hpp>

#include "oversmooth/core/binary_io.hpp"
#include "oversmooth/core/error.hpp"
#include "oversmooth/core/mel_io.hpp"
#include "oversmooth/core/spectrogram.hpp"
#include "oversmooth/toylab/toylab.hpp"

namespace oversmooth::toylab {
namespace {

constexpr std::uint64_t kCorpusStream = 0x544F59;

[[noreturn]] void bad_spec(const std::string& what) { throw Error(ErrorCode::kInvalidArgument, what); }

Grid parse_prototype(const nlohmann::json& j) {
  if (j.is_number()) return Grid(1, 1, j.get<double>());
  if (!j.is_array() || j.empty() || !j[0].is_array() || j[0].empty()) {
    bad_spec("a prototype is a number or a non-empty list of equal-length rows");
  }
  const std::size_t rows = j.size(), cols = j[0].size();
  Grid g(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (!j[r].is_array() || j[r].size() != cols) bad_spec("prototype rows differ in length");
    for (std::size_t c = 0; c < cols; ++c) g(r, c) = j[r][c].get<double>();
  }
  return g;
}

nlohmann::json prototype_json(const Grid& g) {
  if (g.rows() == 1 && g.cols() == 1) return g(0, 0);
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t r = 0; r < g.rows(); ++r) {
    rows.push_back(std::vector<double>(g.row(r).begin(), g.row(r).end()));
  }
  return rows;
}

}  // namespace

std::size_t ToyCorpusSpec::rows() const {
  return conditions.empty() || conditions[0].prototypes.empty() ? 0 : conditions[0].prototypes[0].rows();
}

std::size_t ToyCorpusSpec::cols() const {
  return conditions.empty() || conditions[0].prototypes.empty() ? 0 : conditions[0].prototypes[0].cols();
}

double ToyCorpusSpec::max_noise() const {
  double s = 0.0;
  for (const auto& c : conditions) s = std::max(s, c.noise);
  return s;
}

void ToyCorpusSpec::validate() const {
  if (conditions.empty()) bad_spec("corpus needs at least one condition");
  if (samples_per_condition == 0) bad_spec("samples per condition must be positive");
  const std::size_t h = rows(), w = cols();
  for (std::size_t c = 0; c < conditions.size(); ++c) {
    const auto& cond = conditions[c];
    const std::string where = "condition " + std::to_string(c);
    if (cond.prototypes.empty()) bad_spec(where + " has no modes");
    if (cond.weights.size() != cond.prototypes.size()) bad_spec(where + ": one weight per mode required");
    double total = 0.0;
    for (double w8 : cond.weights) {
      if (!std::isfinite(w8) || w8 < 0.0) bad_spec(where + ": weights must be non-negative");
      total += w8;
    }
    if (std::abs(total - 1.0) > 1e-9) bad_spec(where + ": weights sum to " + std::to_string(total));
    if (!std::isfinite(cond.noise) || cond.noise < 0.0) bad_spec(where + ": noise must be >= 0");
    for (const auto& p : cond.prototypes) {
      if (p.rows() != h || p.cols() != w || p.empty()) bad_spec(where + ": prototypes must share one shape");
      for (double v : p.values()) {
        if (!std::isfinite(v)) bad_spec(where + ": prototype is not finite");
      }
    }
  }
}

ToyCorpusSpec canonical_spec(std::uint64_t seed, std::size_t samples_per_condition) {
  constexpr std::size_t kSide = 8;
  ToyCorpusSpec spec;
  spec.samples_per_condition = samples_per_condition;
  spec.seed = seed;
  for (double a : {1.0, -1.0}) {
    for (double b : {1.0, -1.0}) {
      Grid bands_h(kSide, kSide), bands_v(kSide, kSide);
      for (std::size_t r = 0; r < kSide; ++r) {
        for (std::size_t c = 0; c < kSide; ++c) {
          bands_h(r, c) = r < kSide / 2 ? a : -a;
          bands_v(r, c) = c < kSide / 2 ? b : -b;
        }
      }
      spec.conditions.push_back({{bands_h, bands_v}, {0.5, 0.5}, 0.05});
    }
  }
  return spec;
}

ToyCorpusSpec scalar_spec(std::vector<double> modes, std::vector<double> weights, double noise, std::size_t samples,
                          std::uint64_t seed) {
  ConditionSpec cond;
  for (double m : modes) cond.prototypes.emplace_back(1, 1, m);
  cond.weights = std::move(weights);
  cond.noise = noise;
  return ToyCorpusSpec{{std::move(cond)}, samples, seed};
}

ToyCorpusSpec spec_from_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("corpus spec: ") + e.what());
  }
  ToyCorpusSpec spec;
  try {
    spec.samples_per_condition = j.at("samples_per_condition").get<std::size_t>();
    spec.seed = j.value("seed", std::uint64_t{0});
    for (const auto& c : j.at("conditions")) {
      ConditionSpec cond;
      for (const auto& p : c.at("prototypes")) cond.prototypes.push_back(parse_prototype(p));
      cond.weights = c.at("weights").get<std::vector<double>>();
      cond.noise = c.value("noise", 0.0);
      spec.conditions.push_back(std::move(cond));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("corpus spec: ") + e.what());
  }
  spec.validate();
  return spec;
}

std::string spec_to_json(const ToyCorpusSpec& spec) {
  nlohmann::json j;
  j["samples_per_condition"] = spec.samples_per_condition;
  j["seed"] = spec.seed;
  j["conditions"] = nlohmann::json::array();
  for (const auto& c : spec.conditions) {
    nlohmann::json protos = nlohmann::json::array();
    for (const auto& p : c.prototypes) protos.push_back(prototype_json(p));
    j["conditions"].push_back({{"prototypes", protos}, {"weights", c.weights}, {"noise", c.noise}});
  }
  return j.dump(2) + "\n";
}

std::vector<Grid> ToyCorpus::values_of(std::size_t condition) const {
  std::vector<Grid> out;
  for (const auto& s : samples) {
    if (s.condition == condition) out.push_back(s.value);
  }
  return out;
}

ToyCorpus make_corpus(const ToyCorpusSpec& spec) {
  spec.validate();
  ToyCorpus corpus{spec, {}};
  corpus.samples.reserve(spec.conditions.size() * spec.samples_per_condition);
  const SeededRng root(spec.seed, kCorpusStream);
  for (std::size_t c = 0; c < spec.conditions.size(); ++c) {
    const auto& cond = spec.conditions[c];
    const SeededRng per_condition = root.substream(c);
    for (std::size_t i = 0; i < spec.samples_per_condition; ++i) {
      SeededRng rng = per_condition.substream(i);
      const double u = rng.uniform();
      std::size_t mode = cond.weights.size() - 1;
      double cum = 0.0;
      for (std::size_t k = 0; k < cond.weights.size(); ++k) {
        cum += cond.weights[k];
        if (u < cum) {
          mode = k;
          break;
        }
      }
      // Zero-weight modes are never drawn, even through the fallback.
      while (cond.weights[mode] == 0.0 && mode > 0) --mode;
      Grid value = cond.prototypes[mode];
      if (cond.noise > 0.0) {
        for (double& v : value.values()) v += cond.noise * rng.normal();
      }
      corpus.samples.push_back({c, mode, std::move(value)});
    }
  }
  return corpus;
}

void write_corpus(const ToyCorpus& corpus, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + dir.string() + ": " + ec.message());
  nlohmann::json manifest = nlohmann::json::array();
  for (std::size_t i = 0; i < corpus.samples.size(); ++i) {
    const auto& s = corpus.samples[i];
    std::string name = std::to_string(i);
    name = "sample_" + std::string(name.size() < 5 ? 5 - name.size() : 0, '0') + name + ".mel";
    write_mel(to_spectrogram(s.value), dir / name);
    manifest.push_back({{"condition", s.condition}, {"mode", s.mode}, {"seed", corpus.spec.seed}, {"mel", name}});
  }
  write_file_text(dir / "manifest.json", manifest.dump(2) + "\n");
}

}  // namespace oversmooth::toylab
