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

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>

#include <json.hpp>

#include "oversmooth/core/binary_io.hpp"
#include "oversmooth/core/error.hpp"
#include "oversmooth/core/mel_io.hpp"
#include "oversmooth/density/dip.hpp"
#include "oversmooth/toylab/toylab.hpp"

namespace oversmooth::toylab {
namespace {

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an oversmooth::Error";
  return ErrorCode::kInvalidArgument;
}

std::vector<double> scalars(const std::vector<Grid>& grids) {
  std::vector<double> out;
  for (const auto& g : grids) out.push_back(g(0, 0));
  return out;
}

std::vector<Grid> generate(const Generator& gen, std::size_t condition, std::size_t n, std::uint64_t seed) {
  SeededRng rng(seed, condition);
  std::vector<Grid> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(gen.generate(condition, rng));
  return out;
}

TEST(MakeCorpus, NoiselessSingleModeRepeatsPrototype) {
  const auto corpus = make_corpus(scalar_spec({0.7}, {1.0}, 0.0, 50, 3));
  ASSERT_EQ(corpus.samples.size(), 50u);
  for (const auto& s : corpus.samples) {
    EXPECT_EQ(s.value(0, 0), 0.7);
    EXPECT_EQ(s.mode, 0u);
  }
}

TEST(MakeCorpus, ModeFrequenciesWithinBinomialBound) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto corpus = make_corpus(scalar_spec({-1.0, 1.0}, {0.8, 0.2}, 0.05, 1000, seed));
    const auto first = std::count_if(corpus.samples.begin(), corpus.samples.end(),
                                     [](const ToySample& s) { return s.mode == 0; });
    EXPECT_NEAR(static_cast<double>(first), 800.0, 38.0) << "seed " << seed;
  }
}

TEST(MakeCorpus, DeterministicPerSeed) {
  const auto a = make_corpus(canonical_spec(11, 40));
  const auto b = make_corpus(canonical_spec(11, 40));
  const auto c = make_corpus(canonical_spec(12, 40));
  ASSERT_EQ(a.samples.size(), 160u);
  bool differs = false;
  for (std::size_t i = 0; i < a.samples.size(); ++i) {
    EXPECT_EQ(a.samples[i].value, b.samples[i].value);
    EXPECT_EQ(a.samples[i].mode, b.samples[i].mode);
    differs = differs || !(a.samples[i].value == c.samples[i].value);
  }
  EXPECT_TRUE(differs);
}

TEST(MakeCorpus, SamplesArePrototypePlusNoise) {
  const auto corpus = make_corpus(canonical_spec(5, 100));
  double sum_sq = 0.0;
  std::size_t count = 0;
  for (const auto& s : corpus.samples) {
    const Grid& p = corpus.spec.conditions[s.condition].prototypes[s.mode];
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double d = s.value.values()[i] - p.values()[i];
      sum_sq += d * d;
      ++count;
    }
  }
  EXPECT_NEAR(std::sqrt(sum_sq / static_cast<double>(count)), 0.05, 0.002);
}

TEST(MakeCorpus, RejectsInvalidSpecs) {
  auto spec = scalar_spec({0.0, 1.0}, {0.5, 0.6}, 0.1, 10);
  EXPECT_EQ(code_of([&] { make_corpus(spec); }), ErrorCode::kInvalidArgument);
  spec = scalar_spec({0.0}, {1.0}, -0.1, 10);
  EXPECT_EQ(code_of([&] { make_corpus(spec); }), ErrorCode::kInvalidArgument);
  spec = scalar_spec({}, {}, 0.1, 10);
  EXPECT_EQ(code_of([&] { make_corpus(spec); }), ErrorCode::kInvalidArgument);
  spec = canonical_spec();
  spec.conditions[1].prototypes[0] = Grid(4, 4);
  EXPECT_EQ(code_of([&] { make_corpus(spec); }), ErrorCode::kInvalidArgument);
}

TEST(CorpusSpecJson, RoundTripAndErrors) {
  const auto spec = canonical_spec(9, 30);
  const auto back = spec_from_json(spec_to_json(spec));
  EXPECT_EQ(spec_to_json(back), spec_to_json(spec));
  EXPECT_EQ(make_corpus(back).samples[7].value, make_corpus(spec).samples[7].value);
  const auto scalar = spec_from_json(
      R"({"samples_per_condition": 4, "conditions": [{"prototypes": [-1, 1], "weights": [0.5, 0.5], "noise": 0.1}]})");
  EXPECT_EQ(scalar.rows(), 1u);
  EXPECT_EQ(scalar.conditions[0].prototypes[1](0, 0), 1.0);
  EXPECT_EQ(code_of([] { spec_from_json("{"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] { spec_from_json(R"({"conditions": []})"); }), ErrorCode::kParse);
  EXPECT_EQ(code_of([] {
              spec_from_json(R"({"samples_per_condition": 4, "conditions": [{"prototypes": [1], "weights": [0.3]}]})");
            }),
            ErrorCode::kInvalidArgument);
}

TEST(WriteCorpus, OneMelPerSampleAndManifest) {
  const auto corpus = make_corpus(canonical_spec(2, 3));
  const auto dir = std::filesystem::temp_directory_path() / "oversmooth_toy_corpus_test";
  std::filesystem::remove_all(dir);
  write_corpus(corpus, dir);
  const auto manifest = nlohmann::json::parse(read_file_text(dir / "manifest.json"));
  ASSERT_EQ(manifest.size(), corpus.samples.size());
  for (std::size_t i = 0; i < corpus.samples.size(); ++i) {
    EXPECT_EQ(manifest[i]["condition"].get<std::size_t>(), corpus.samples[i].condition);
    EXPECT_EQ(manifest[i]["mode"].get<std::size_t>(), corpus.samples[i].mode);
    EXPECT_EQ(manifest[i]["seed"].get<std::uint64_t>(), 2u);
    const auto mel = read_mel(dir / manifest[i]["mel"].get<std::string>());
    EXPECT_EQ(mel.frames(), 8u);
    EXPECT_EQ(mel(3, 5), static_cast<float>(corpus.samples[i].value(3, 5)));
  }
  std::filesystem::remove_all(dir);
}

TEST(FitPointwise, MseAveragesModes) {
  const auto corpus = make_corpus(scalar_spec({-1.0, 1.0}, {0.5, 0.5}, 0.05, 1000, 1));
  const auto model = fit_pointwise(corpus, PointLoss::kMse);
  EXPECT_NEAR(model.prediction[0](0, 0), 0.0, 0.1);
  // The fit is the sample mean; with exactly balanced modes it is the midpoint.
  double mean = 0.0;
  for (const auto& s : corpus.samples) mean += s.value(0, 0);
  mean /= static_cast<double>(corpus.samples.size());
  EXPECT_NEAR(model.prediction[0](0, 0), mean, 1e-9);
}

TEST(FitPointwise, MseOnBalancedModesPredictsMidpoint) {
  // Balanced by construction: every mode appears equally often.
  ToyCorpus corpus{scalar_spec({-1.0, 1.0}, {0.5, 0.5}, 0.05, 1000), {}};
  SeededRng rng(4, 0);
  for (std::size_t i = 0; i < 1000; ++i) {
    corpus.samples.push_back({0, i % 2, Grid(1, 1, (i % 2 == 0 ? -1.0 : 1.0) + 0.05 * rng.normal())});
  }
  EXPECT_NEAR(fit_pointwise(corpus, PointLoss::kMse).prediction[0](0, 0), 0.0, 0.01);
}

TEST(FitPointwise, MaeFollowsHeavierMode) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto corpus = make_corpus(scalar_spec({-1.0, 1.0}, {0.8, 0.2}, 0.05, 1000, seed));
    EXPECT_NEAR(fit_pointwise(corpus, PointLoss::kMae).prediction[0](0, 0), -1.0, 0.05);
  }
}

TEST(FitPointwise, SingleModeWithinStandardError) {
  const double sigma = 0.2;
  const std::size_t n = 400;
  const auto corpus = make_corpus(scalar_spec({3.0}, {1.0}, sigma, n, 8));
  for (auto loss : {PointLoss::kMse, PointLoss::kMae}) {
    EXPECT_NEAR(fit_pointwise(corpus, loss).prediction[0](0, 0), 3.0, 3.0 * sigma / std::sqrt(double(n)));
  }
}

TEST(FitPointwise, ClosedFormMeanAndMedian) {
  const auto corpus = make_corpus(canonical_spec(6, 37));
  const auto mse = fit_pointwise(corpus, PointLoss::kMse);
  const auto mae = fit_pointwise(corpus, PointLoss::kMae);
  for (std::size_t c = 0; c < 4; ++c) {
    const auto values = corpus.values_of(c);
    for (std::size_t i = 0; i < 64; ++i) {
      std::vector<double> column;
      for (const auto& g : values) column.push_back(g.values()[i]);
      double mean = 0.0;
      for (double v : column) mean += v;
      mean /= static_cast<double>(column.size());
      std::sort(column.begin(), column.end());
      EXPECT_NEAR(mse.prediction[c].values()[i], mean, 1e-9);
      EXPECT_EQ(mae.prediction[c].values()[i], column[column.size() / 2]);
    }
  }
}

TEST(FitPointwise, EmptyCondition) {
  ToyCorpus corpus{canonical_spec(), {}};
  corpus.samples.push_back({0, 0, corpus.spec.conditions[0].prototypes[0]});
  EXPECT_EQ(code_of([&] { fit_pointwise(corpus, PointLoss::kMse); }), ErrorCode::kEmptyCondition);
}

TEST(FitConditioned, RecoversEachMode) {
  const double sigma = 0.05;
  const std::size_t n = 1000;
  const auto corpus = make_corpus(scalar_spec({-1.0, 1.0}, {0.5, 0.5}, sigma, n, 2));
  const auto model = fit_conditioned(corpus);
  for (std::size_t v = 0; v < 2; ++v) {
    const double count = model.frequency[0][v] * n;
    EXPECT_NEAR(model.mean[0][v](0, 0), v == 0 ? -1.0 : 1.0, 3.0 * sigma / std::sqrt(count));
    EXPECT_NEAR(model.frequency[0][v], 0.5, 3.0 * std::sqrt(0.25 / n));
  }
}

TEST(FitConditioned, GeneratedSamplesAreBimodal) {
  const auto corpus = make_corpus(scalar_spec({-1.0, 1.0}, {0.5, 0.5}, 0.05, 1000, 3));
  Hyper hyper;
  const auto cond = fit_strategy(Strategy::kConditioned, corpus, hyper, 1);
  const auto mse = fit_strategy(Strategy::kMse, corpus, hyper, 1);
  const double dip_cond = density::dip_statistic(scalars(generate(*cond, 0, 400, 5))).dip;
  const double dip_mse = density::dip_statistic(scalars(generate(*mse, 0, 400, 5))).dip;
  EXPECT_EQ(dip_mse, 1.0 / 800.0);
  EXPECT_GT(dip_cond, dip_mse);
  EXPECT_GT(dip_cond, 0.2);
}

TEST(FitConditioned, EmptyCell) {
  auto spec = scalar_spec({-1.0, 1.0}, {1.0, 0.0}, 0.05, 50);
  EXPECT_EQ(code_of([&] { fit_conditioned(make_corpus(spec)); }), ErrorCode::kEmptyCondition);
}

TEST(RowContext, HalfMeanSigns) {
  EXPECT_EQ(row_context(std::vector<double>{1, 1, 1, 1}), 0u);
  EXPECT_EQ(row_context(std::vector<double>{1, 1, -1, -1}), 1u);
  EXPECT_EQ(row_context(std::vector<double>{-1, -1, 1, 1}), 2u);
  EXPECT_EQ(row_context(std::vector<double>{-1, -1, -1, -1}), 3u);
  EXPECT_EQ(row_context(std::vector<double>{1, -1, 0, 0}), 0u);
}

TEST(FitAr, GeneratesCoherentPatterns) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto corpus = make_corpus(canonical_spec(seed));
    const auto model = fit_ar(corpus);
    SeededRng rng(seed, 99);
    for (std::size_t c = 0; c < 4; ++c) {
      std::vector<Grid> out;
      for (int i = 0; i < 100; ++i) out.push_back(ar_generate(model, c, rng));
      EXPECT_GE(mode_coherence(out, corpus.spec.conditions[c].prototypes, 0.25), 0.9) << "seed " << seed;
    }
  }
}

TEST(FitAr, TeacherForcedErrorAtNoiseFloor) {
  const auto corpus = make_corpus(canonical_spec(4));
  const auto err = teacher_forced_mse(fit_ar(corpus), corpus);
  for (double v : err.values()) EXPECT_LE(v, 0.05 * 0.05 * 1.2);
}

TEST(FitAr, PointwiseAverageIsIncoherent) {
  const auto corpus = make_corpus(canonical_spec(4));
  const auto mse = fit_pointwise(corpus, PointLoss::kMse);
  for (std::size_t c = 0; c < 4; ++c) {
    const std::vector<Grid> out(10, mse.prediction[c]);
    EXPECT_LE(mode_coherence(out, corpus.spec.conditions[c].prototypes, 0.25), 0.1);
  }
}

TEST(FitAr, Errors) {
  auto spec = canonical_spec(0, 20);
  // Same first row as the horizontal bands: indistinguishable from row 0.
  Grid clash = spec.conditions[0].prototypes[0];
  clash(7, 7) = 3.0;
  spec.conditions[0].prototypes[1] = clash;
  EXPECT_EQ(code_of([&] { fit_ar(make_corpus(spec)); }), ErrorCode::kIndistinguishablePrototypes);
  EXPECT_EQ(code_of([] { fit_ar(make_corpus(scalar_spec({-1.0, 1.0}, {0.5, 0.5}, 0.1, 20))); }),
            ErrorCode::kInvalidArgument);
}

TEST(ModeCoherence, CountingExamples) {
  const auto spec = canonical_spec();
  const auto& protos = spec.conditions[0].prototypes;
  Grid average(8, 8);
  for (std::size_t i = 0; i < 64; ++i) average.values()[i] = 0.5 * (protos[0].values()[i] + protos[1].values()[i]);
  EXPECT_EQ(mode_coherence(protos, protos, 0.1), 1.0);
  EXPECT_EQ(mode_coherence(std::vector<Grid>{average, average}, protos, 0.5), 0.0);
  EXPECT_EQ(mode_coherence(std::vector<Grid>{protos[1], average, protos[0], average}, protos, 0.5), 0.5);
  EXPECT_EQ(code_of([&] { mode_coherence(std::vector<Grid>{}, protos, 0.5); }), ErrorCode::kEmptySample);
  EXPECT_EQ(code_of([&] { mode_coherence(std::vector<Grid>{Grid(2, 2)}, protos, 0.5); }), ErrorCode::kShapeMismatch);
}

TEST(Strategies, NamesParseAndUnknownListsValid) {
  for (Strategy s : all_strategies()) EXPECT_EQ(parse_strategy(strategy_name(s)), s);
  try {
    parse_strategy("wavenet");
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kUnknownStrategy);
    for (Strategy s : all_strategies()) EXPECT_NE(std::string(e.what()).find(strategy_name(s)), std::string::npos);
  }
}

TEST(Strategies, LmRecoversScalarBimodality) {
  const auto corpus = make_corpus(scalar_spec({-1.0, 1.0}, {0.5, 0.5}, 0.05, 500, 7));
  const auto lm = fit_strategy(Strategy::kLm, corpus, Hyper{}, 3);
  EXPECT_GT(density::dip_statistic(scalars(generate(*lm, 0, 500, 1))).dip, 0.05);
}

TEST(Strategies, LmPatternsAreBimodalPerCellButIncoherent) {
  const auto corpus = make_corpus(canonical_spec(1));
  const auto lm = fit_strategy(Strategy::kLm, corpus, Hyper{}, 3);
  const auto out = generate(*lm, 0, 200, 2);
  EXPECT_LE(mode_coherence(out, corpus.spec.conditions[0].prototypes, 0.25), 0.2);
  // Cell (0, 7): the bands disagree there (+1 vs -1), so its marginal is bimodal.
  std::vector<double> column;
  for (const auto& g : out) column.push_back(g(0, 7));
  EXPECT_GT(density::dip_statistic(column).dip, 0.1);
}

TEST(Strategies, FlowCapturesDependence) {
  const auto corpus = make_corpus(canonical_spec(2));
  const auto flow = fit_strategy(Strategy::kFlow, corpus, Hyper{}, 5);
  double coherence = 0.0;
  for (std::size_t c = 0; c < 4; ++c) {
    coherence += mode_coherence(generate(*flow, c, 100, 3), corpus.spec.conditions[c].prototypes, 0.25) / 4.0;
  }
  EXPECT_GE(coherence, 0.7);
}

TEST(Strategies, GeneratedValuesStayInCorpusRange) {
  const auto corpus = make_corpus(canonical_spec(3));
  Hyper hyper;
  hyper.gan.iterations = 50;
  double lo = 1e300, hi = -1e300;
  for (const auto& s : corpus.samples) {
    for (double v : s.value.values()) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  for (Strategy s : all_strategies()) {
    const auto gen = fit_strategy(s, corpus, hyper, 1);
    for (std::size_t c = 0; c < 4; ++c) {
      for (const auto& g : generate(*gen, c, 50, 4)) {
        for (double v : g.values()) {
          ASSERT_TRUE(std::isfinite(v)) << strategy_name(s);
          ASSERT_GE(v, lo - 6 * 0.05) << strategy_name(s);
          ASSERT_LE(v, hi + 6 * 0.05) << strategy_name(s);
        }
      }
    }
  }
}

TEST(RunExperiment, ReportIsDeterministic) {
  const Strategy some[] = {Strategy::kMse, Strategy::kAr, Strategy::kConditioned, Strategy::kMae};
  const auto a = report_json(run_experiment(canonical_spec(), some, 7));
  const auto b = report_json(run_experiment(canonical_spec(), some, 7));
  const auto c = report_json(run_experiment(canonical_spec(), some, 8));
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
}

TEST(RunExperiment, MseIsMostOversmoothed) {
  const Strategy some[] = {Strategy::kMse, Strategy::kAr, Strategy::kConditioned, Strategy::kLm};
  const auto report = run_experiment(canonical_spec(), some, 1);
  const double gt = *report.reference.var_l;
  const double mse = *report.find("mse")->var_l;
  for (const auto& r : report.rows) {
    if (r.name != "mse") EXPECT_GT(*r.var_l, mse) << r.name;
    EXPECT_TRUE(r.nll.has_value());
  }
  EXPECT_LT(std::abs(*report.find("ar")->var_l - gt), std::abs(mse - gt));
  EXPECT_EQ(report.reference.mode_coherence, 1.0);
  EXPECT_FALSE(report.reference.nll.has_value());
}

TEST(RunExperiment, CombinationAtLeastAsCoherent) {
  const Strategy some[] = {Strategy::kLm, Strategy::kConditioned, Strategy::kConditionedLm};
  const auto report = run_experiment(canonical_spec(), some, 2);
  const double combo = report.find("conditioned_lm")->mode_coherence;
  EXPECT_GE(combo, report.find("lm")->mode_coherence);
  EXPECT_GE(combo, report.find("conditioned")->mode_coherence - 0.05);
}

TEST(RunExperiment, ScalarCorpusAndErrors) {
  const auto spec = scalar_spec({-1.0, 1.0}, {0.5, 0.5}, 0.05, 300);
  const Strategy some[] = {Strategy::kMse, Strategy::kConditioned};
  const auto report = run_experiment(spec, some, 1);
  EXPECT_FALSE(report.rows[0].var_l.has_value());
  EXPECT_GT(report.rows[1].dip, report.unimodal_dip_p95);
  const Strategy ar[] = {Strategy::kAr};
  EXPECT_EQ(code_of([&] { run_experiment(spec, ar, 1); }), ErrorCode::kInvalidArgument);
  const Strategy twice[] = {Strategy::kMse, Strategy::kMse};
  EXPECT_EQ(code_of([&] { run_experiment(spec, twice, 1); }), ErrorCode::kInvalidArgument);
}

TEST(RunExperiment, JsonAndMarkdown) {
  const Strategy one[] = {Strategy::kMse};
  const auto report = run_experiment(canonical_spec(), one, 3);
  const auto j = nlohmann::json::parse(report_json(report));
  EXPECT_EQ(j["strategies"].size(), 1u);
  EXPECT_EQ(j["strategies"][0]["name"], "mse");
  EXPECT_TRUE(j["reference"]["nll"].is_null());
  std::vector<std::string> keys;
  for (const auto& [k, v] : j.items()) keys.push_back(k);
  EXPECT_TRUE(std::is_sorted(keys.begin(), keys.end()));
  const auto md = report_markdown(report);
  EXPECT_NE(md.find("MOS"), std::string::npos);
  EXPECT_NE(md.find("| mse |"), std::string::npos);
  EXPECT_NE(md.find("| ground_truth |"), std::string::npos);
}

}  // namespace
}  // namespace oversmooth::toylab
