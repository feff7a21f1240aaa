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

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oversmooth/cli/app.hpp"
#include "oversmooth/cli/report.hpp"
#include "oversmooth/core/binary_io.hpp"
#include "oversmooth/core/mel_io.hpp"
#include "oversmooth/core/rng.hpp"
#include "oversmooth/dsp/wav.hpp"

namespace oversmooth::cli {
namespace {

namespace fs = std::filesystem;

struct Outcome {
  int code = 0;
  std::string out;
  std::string err;
  nlohmann::json report() const { return nlohmann::json::parse(out); }
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "oversmooth");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Outcome o;
  o.code = run(static_cast<int>(argv.size()), argv.data(), out, err);
  o.out = out.str();
  o.err = err.str();
  return o;
}

// Tag-balance and attribute-quoting check; enough to catch malformed output.
bool well_formed_xml(const std::string& text) {
  std::vector<std::string> stack;
  std::size_t i = 0;
  while ((i = text.find('<', i)) != std::string::npos) {
    const auto close = text.find('>', i);
    if (close == std::string::npos) return false;
    std::string tag = text.substr(i + 1, close - i - 1);
    i = close + 1;
    if (tag.empty()) return false;
    if (tag[0] == '?' || tag[0] == '!') continue;
    std::size_t quotes = 0;
    for (char c : tag) quotes += c == '"';
    if (quotes % 2 != 0) return false;
    if (tag[0] == '/') {
      if (stack.empty() || stack.back() != tag.substr(1)) return false;
      stack.pop_back();
      continue;
    }
    if (tag.back() == '/') continue;
    stack.push_back(tag.substr(0, tag.find_first_of(" \n")));
  }
  return stack.empty();
}

void expect_figure(const fs::path& path) {
  const auto svg = read_file_text(path);
  EXPECT_TRUE(well_formed_xml(svg)) << path;
  EXPECT_EQ(svg.rfind("<?xml", 0), 0u);
  EXPECT_NE(svg.find("oversmooth 0.1.0"), std::string::npos);
  EXPECT_NE(svg.find("<svg"), std::string::npos);
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("oversmooth_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    unsetenv("OVERSMOOTH_SEED");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  std::string tone(const std::string& name, double rate, double seconds = 0.5) const {
    dsp::AudioClip clip;
    clip.sample_rate = rate;
    const auto n = static_cast<std::size_t>(rate * seconds);
    for (std::size_t i = 0; i < n; ++i) {
      clip.samples.push_back(0.5 * std::sin(2.0 * std::numbers::pi * 440.0 * static_cast<double>(i) / rate));
    }
    dsp::write_wav(clip, path(name));
    return path(name);
  }

  std::string mel(const std::string& name, std::size_t frames, std::size_t bins, std::uint64_t seed) const {
    SeededRng rng(seed, 0);
    Spectrogram s(frames, bins);
    for (std::size_t t = 0; t < frames; ++t) {
      for (std::size_t f = 0; f < bins; ++f) s.set(t, f, static_cast<float>(rng.normal()));
    }
    write_mel(s, path(name));
    return path(name);
  }

  // Utterances whose "R" frames are bimodal in every bin.
  std::string dist_manifest() const {
    nlohmann::json manifest = nlohmann::json::array();
    SeededRng rng(3, 1);
    for (int u = 0; u < 4; ++u) {
      Spectrogram s(40, 16);
      for (std::size_t t = 0; t < 40; ++t) {
        const double centre = (t / 5) % 2 == 0 ? -2.0 : 2.0;
        for (std::size_t f = 0; f < 16; ++f) s.set(t, f, static_cast<float>(centre + 0.3 * rng.normal()));
      }
      const std::string m = "u" + std::to_string(u) + ".mel", a = "u" + std::to_string(u) + ".txt";
      write_mel(s, path(m));
      write_file_text(path(a), "sil\t0\t5\nR\t5\t35\nsil\t35\t40\n");
      manifest.push_back({{"mel", m}, {"align", a}});
    }
    write_file_text(path("manifest.json"), manifest.dump());
    return path("manifest.json");
  }

  fs::path dir_;
};

TEST_F(CliTest, MelDefaultsAndBins) {
  const auto wav = tone("a.wav", 22050.0);
  auto o = invoke({"mel", wav, path("a.mel")});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(read_mel(path("a.mel")).bins(), 80u);
  EXPECT_EQ(o.report()["results"]["bins"], 80);
  EXPECT_EQ(o.report()["inputs"][0]["sha256"], sha256_file(wav));
  o = invoke({"mel", wav, path("b.mel"), "--bins", "40"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(read_mel(path("b.mel")).bins(), 40u);
}

TEST_F(CliTest, MelRejectsOtherRates) {
  const auto o = invoke({"mel", tone("hi.wav", 44100.0), path("x.mel")});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("44100"), std::string::npos);
  EXPECT_TRUE(o.out.empty());
}

TEST_F(CliTest, MetricsSingleAndPair) {
  const auto a = mel("a.mel", 30, 20, 1);
  auto o = invoke({"metrics", a});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_TRUE(o.report()["results"].contains("var_l"));
  EXPECT_FALSE(o.report()["results"].contains("ssim"));
  o = invoke({"metrics", a, a, "--ssim", "--svg", path("m.svg")});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.report()["results"]["ssim"].get<double>(), 1.0);
  expect_figure(path("m.svg"));
}

TEST_F(CliTest, MetricsContractErrors) {
  const auto a = mel("a.mel", 30, 20, 1);
  const auto b = mel("b.mel", 31, 20, 2);
  EXPECT_EQ(invoke({"metrics", a, b, "--ssim"}).code, 2);
  EXPECT_EQ(invoke({"metrics", a, "--ssim"}).code, 2);
  EXPECT_EQ(invoke({"metrics", path("missing.mel")}).code, 2);
}

TEST_F(CliTest, DistSingleBin) {
  const auto manifest = dist_manifest();
  const auto o = invoke({"dist", manifest, "--ph", "R", "--bin", "10", "--csv", path("d.csv"), "--svg", path("d.svg")});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto cells = o.report()["results"]["cells"];
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_EQ(cells[0]["samples"], 120);
  EXPECT_GT(cells[0]["dip"].get<double>(), 0.1);
  const auto csv = read_file_text(path("d.csv"));
  EXPECT_EQ(csv.rfind("x,density\n", 0), 0u);
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 513);
  expect_figure(path("d.svg"));
  EXPECT_NE(read_file_text(path("d.svg")).find("bin 10"), std::string::npos);
}

TEST_F(CliTest, DistSeveralBinsAndJoint) {
  const auto manifest = dist_manifest();
  auto o = invoke({"dist", manifest, "--ph", "R", "--bins", "1,5,9", "--csv", path("m.csv")});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.report()["results"]["cells"].size(), 3u);
  EXPECT_EQ(read_file_text(path("m.csv")).rfind("bin,x,density\n", 0), 0u);
  o = invoke({"dist", manifest, "--ph", "R", "--joint", "freq:10,11", "--csv", path("j.csv"), "--svg", path("j.svg")});
  ASSERT_EQ(o.code, 0) << o.err;
  const auto csv = read_file_text(path("j.csv"));
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 128 * 128 + 1);
  expect_figure(path("j.svg"));
  o = invoke({"dist", manifest, "--ph", "R", "--joint", "time:3,1"});
  ASSERT_EQ(o.code, 0) << o.err;
}

TEST_F(CliTest, DistContractErrors) {
  const auto manifest = dist_manifest();
  EXPECT_EQ(invoke({"dist", manifest, "--ph", "QQ", "--bin", "1"}).code, 2);
  EXPECT_EQ(invoke({"dist", manifest, "--ph", "R", "--bin", "16"}).code, 2);
  EXPECT_EQ(invoke({"dist", manifest, "--ph", "R"}).code, 2);
  EXPECT_EQ(invoke({"dist", manifest, "--ph", "R", "--bin", "1", "--joint", "freq:1,2"}).code, 2);
  EXPECT_EQ(invoke({"dist", manifest, "--ph", "R", "--joint", "diag:1"}).code, 2);
}

TEST_F(CliTest, ToylabSingleStrategyAndUnknown) {
  auto o = invoke({"toylab", "--strategies", "mse", "--seed", "7", "--generated", "50"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.report()["results"]["strategies"].size(), 1u);
  o = invoke({"toylab", "--strategies", "mse,nope"});
  EXPECT_EQ(o.code, 2);
  EXPECT_NE(o.err.find("conditioned_lm"), std::string::npos);
  EXPECT_EQ(invoke({"toylab", "--preset", "other"}).code, 2);
}

TEST_F(CliTest, ToylabDeterministicArtifacts) {
  const std::vector<std::string> args{"toylab", "--strategies", "mse,ar,conditioned,mae", "--seed", "7",
                                      "--generated", "60", "--svg", path("t.svg"), "--markdown", path("t.md")};
  const auto first = invoke(args);
  ASSERT_EQ(first.code, 0) << first.err;
  const auto svg = read_file_text(path("t.svg"));
  const auto md = read_file_text(path("t.md"));
  const auto second = invoke(args);
  EXPECT_EQ(first.out, second.out);
  EXPECT_EQ(svg, read_file_text(path("t.svg")));
  EXPECT_EQ(md, read_file_text(path("t.md")));
  expect_figure(path("t.svg"));
  EXPECT_NE(md.find("MOS"), std::string::npos);
}

TEST_F(CliTest, ToylabSpecFileAndSeedFallback) {
  write_file_text(path("spec.json"),
                  R"({"samples_per_condition": 200, "conditions": [{"prototypes": [-1, 1], "weights": [0.5, 0.5], "noise": 0.05}]})");
  setenv("OVERSMOOTH_SEED", "42", 1);
  auto o = invoke({"toylab", "--spec", path("spec.json"), "--strategies", "mse,conditioned", "--generated", "40"});
  ASSERT_EQ(o.code, 0) << o.err;
  EXPECT_EQ(o.report()["parameters"]["seed"], 42);
  EXPECT_TRUE(o.report()["results"]["reference"]["var_l"].is_null());
  o = invoke({"toylab", "--spec", path("spec.json"), "--strategies", "mse", "--seed", "5", "--generated", "40"});
  EXPECT_EQ(o.report()["parameters"]["seed"], 5);
  setenv("OVERSMOOTH_SEED", "abc", 1);
  EXPECT_EQ(invoke({"toylab", "--strategies", "mse"}).code, 2);
  unsetenv("OVERSMOOTH_SEED");
}

TEST_F(CliTest, FlowTrainNllSample) {
  std::vector<std::string> files;
  for (int i = 0; i < 48; ++i) files.push_back(mel("f" + std::to_string(i) + ".mel", 4, 3, 100 + i));
  std::vector<std::string> train{"flow", "train", "-o", path("f.flw"), "--epochs", "5", "--batch", "16", "--seed",
                                 "3", "--curve", path("c.csv"), "--svg", path("c.svg")};
  train.insert(train.end(), files.begin(), files.end());
  const auto t = invoke(train);
  ASSERT_EQ(t.code, 0) << t.err;
  expect_figure(path("c.svg"));
  std::vector<std::string> score{"flow", "nll", path("f.flw")};
  score.insert(score.end(), files.begin(), files.end());
  const auto n = invoke(score);
  ASSERT_EQ(n.code, 0) << n.err;
  EXPECT_NEAR(n.report()["results"]["nll"].get<double>(), t.report()["results"]["final_nll"].get<double>(), 1e-6);

  auto s1 = invoke({"flow", "sample", path("f.flw"), "-o", path("s1.mel"), "--seed", "9"});
  auto s2 = invoke({"flow", "sample", path("f.flw"), "-o", path("s2.mel"), "--seed", "9"});
  ASSERT_EQ(s1.code, 0) << s1.err;
  EXPECT_EQ(read_file_bytes(path("s1.mel")), read_file_bytes(path("s2.mel")));
  EXPECT_EQ(read_mel(path("s1.mel")).bins(), 3u);

  const auto wrong = mel("wrong.mel", 4, 5, 1);
  EXPECT_EQ(invoke({"flow", "nll", path("f.flw"), wrong}).code, 2);
}

TEST_F(CliTest, FlowDivergenceIsInternalFailure) {
  std::vector<std::string> args{"flow", "train", "-o", path("d.flw"), "--epochs", "3", "--lr", "1e200"};
  for (int i = 0; i < 16; ++i) args.push_back(mel("f" + std::to_string(i) + ".mel", 4, 2, i));
  EXPECT_EQ(invoke(args).code, 1);
}

TEST_F(CliTest, UsageErrorsAndHelp) {
  EXPECT_EQ(invoke({}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"mel"}).code, 2);
  EXPECT_EQ(invoke({"--help"}).code, 0);
  const auto v = invoke({"--version"});
  EXPECT_EQ(v.code, 0);
  EXPECT_NE(v.out.find("0.1.0"), std::string::npos);
}

TEST_F(CliTest, ProcessExitCodesAndStreams) {
  const std::string exe = OVERSMOOTH_CLI_PATH;
  const auto a = mel("a.mel", 20, 10, 4);
  auto status = [](const std::string& cmd) {
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  EXPECT_EQ(status(exe + " metrics " + a + " > " + path("r.json") + " 2> " + path("e.txt")), 0);
  EXPECT_NO_THROW(nlohmann::json::parse(read_file_text(path("r.json"))));
  EXPECT_TRUE(read_file_text(path("e.txt")).empty());
  EXPECT_EQ(status(exe + " metrics " + a + " --ssim > " + path("r2.json") + " 2> " + path("e2.txt")), 2);
  EXPECT_TRUE(read_file_text(path("r2.json")).empty());
  EXPECT_FALSE(read_file_text(path("e2.txt")).empty());
  EXPECT_EQ(status(exe + " metrics " + a + " --out " + path("r3.json") + " > " + path("o3.txt")), 0);
  EXPECT_EQ(read_file_text(path("r3.json")), read_file_text(path("r.json")));
  EXPECT_TRUE(read_file_text(path("o3.txt")).empty());
}

TEST(Svg, RampAndEscaping) {
  EXPECT_EQ(ramp_color(0.0), (std::array<std::uint8_t, 3>{0x44, 0x01, 0x54}));
  EXPECT_EQ(ramp_color(1.0), (std::array<std::uint8_t, 3>{0xfd, 0xe7, 0x25}));
  EXPECT_EQ(ramp_color(0.5), (std::array<std::uint8_t, 3>{0x21, 0x91, 0x8c}));
  EXPECT_EQ(xml_escape("a<b & \"c\""), "a&lt;b &amp; &quot;c&quot;");
  const auto svg = bar_chart("t", {"x", "y<z"}, {{"value", {1.0, std::nullopt}}});
  EXPECT_TRUE(well_formed_xml(svg));
  EXPECT_NE(svg.find("y&lt;z"), std::string::npos);
}

TEST(ReportJson, SortedKeysAndDigest) {
  Report r;
  r.command = "x";
  r.results = {{"zeta", 1}, {"alpha", 2}};
  const auto text = r.to_json();
  EXPECT_LT(text.find("alpha"), text.find("zeta"));
  EXPECT_LT(text.find("\"command\""), text.find("\"version\""));
  const std::uint8_t abc[] = {'a', 'b', 'c'};
  EXPECT_EQ(sha256_hex(abc), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // namespace
}  // namespace oversmooth::cli
