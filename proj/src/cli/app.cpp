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

#include "oversmooth/cli/app.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <cstdlib>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "oversmooth/cli/report.hpp"
#include "oversmooth/core/alignment.hpp"
#include "oversmooth/core/binary_io.hpp"
#include "oversmooth/core/error.hpp"
#include "oversmooth/core/mel_io.hpp"
#include "oversmooth/core/spectrogram.hpp"
#include "oversmooth/density/dip.hpp"
#include "oversmooth/density/kde.hpp"
#include "oversmooth/density/phoneme.hpp"
#include "oversmooth/dsp/mel.hpp"
#include "oversmooth/dsp/wav.hpp"
#include "oversmooth/flow/flow.hpp"
#include "oversmooth/metrics/laplacian.hpp"
#include "oversmooth/metrics/ssim.hpp"
#include "oversmooth/toylab/toylab.hpp"

namespace oversmooth::cli {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

constexpr std::uint64_t kFlowInitStream = 0x464C4954;
constexpr std::uint64_t kFlowSampleStream = 0x464C5350;

std::uint64_t parse_u64(std::string_view text, std::string_view what) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (text.empty() || ec != std::errc() || ptr != end) {
    throw UsageError(fmt::format("{} must be a non-negative integer, got '{}'", what, text));
  }
  return v;
}

/// --seed wins, then OVERSMOOTH_SEED, then 0.
std::uint64_t resolve_seed(const std::string& flag) {
  if (!flag.empty()) return parse_u64(flag, "--seed");
  if (const char* env = std::getenv("OVERSMOOTH_SEED"); env != nullptr && *env != '\0') {
    return parse_u64(env, "OVERSMOOTH_SEED");
  }
  return 0;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  while (true) {
    const auto pos = text.find(sep);
    std::string_view part = text.substr(0, pos);
    while (!part.empty() && part.front() == ' ') part.remove_prefix(1);
    while (!part.empty() && part.back() == ' ') part.remove_suffix(1);
    if (!part.empty()) out.emplace_back(part);
    if (pos == std::string_view::npos) break;
    text = text.substr(pos + 1);
  }
  return out;
}

std::vector<std::size_t> parse_bins(std::string_view text) {
  std::vector<std::size_t> bins;
  for (const auto& part : split(text, ',')) bins.push_back(parse_u64(part, "bin"));
  if (bins.empty()) throw UsageError("--bins needs at least one bin");
  return bins;
}

density::JointAxis parse_joint(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const auto nums = colon == std::string::npos ? std::vector<std::size_t>{} : parse_bins(text.substr(colon + 1));
  if (kind == "freq" && nums.size() == 2) return density::FreqPair{nums[0], nums[1]};
  if (kind == "time" && nums.size() == 2) return density::TimeLag{nums[0], nums[1]};
  throw UsageError("--joint expects freq:F1,F2 or time:F,LAG, got '" + text + "'");
}

void emit(const Report& report, const std::string& path, std::ostream& out) {
  if (path.empty()) {
    out << report.to_json();
  } else {
    write_file_text(path, report.to_json());
  }
}

void write_artifact(Report& report, const std::string& path, std::string_view text) {
  if (path.empty()) return;
  write_file_text(path, text);
  report.add_output(path);
}

// ---------------------------------------------------------------------------

struct MelArgs {
  std::string wav, mel, out;
  std::size_t frame = dsp::kDefaultFrameSize;
  std::size_t hop = dsp::kDefaultHop;
  std::size_t bins = dsp::kDefaultMelBins;
  double floor = dsp::kDefaultAmplitudeFloor;
};

void cmd_mel(const MelArgs& a, std::ostream& out) {
  const auto clip = dsp::read_wav(a.wav);
  dsp::MelFilterbankConfig fb_cfg;
  fb_cfg.fft_size = a.frame;
  fb_cfg.mel_bins = a.bins;
  const dsp::MelFilterbank fb(fb_cfg);
  const auto mel = dsp::mel_spectrogram(clip, fb, a.frame, a.hop, a.floor);
  write_mel(mel, a.mel);
  Report r;
  r.command = "mel";
  r.add_input(a.wav);
  r.add_output(a.mel);
  r.parameters = {{"frame", a.frame}, {"hop", a.hop}, {"bins", a.bins}, {"floor", a.floor},
                  {"sample_rate", fb.sample_rate()}};
  r.results = {{"frames", mel.frames()}, {"bins", mel.bins()}};
  emit(r, a.out, out);
}

struct MetricsArgs {
  std::string a, b, svg, out;
  bool want_ssim = false;
  bool gaussian = false;
  std::size_t window = 11;
};

Grid abs_transposed(const Grid& g) {
  Grid t = g.transposed();
  for (double& v : t.values()) v = std::abs(v);
  return t;
}

void cmd_metrics(const MetricsArgs& a, std::ostream& out) {
  if (a.want_ssim && a.b.empty()) throw UsageError("--ssim needs a second input");
  const auto mel_a = read_mel(a.a);
  Report r;
  r.command = "metrics";
  r.add_input(a.a);
  r.results["var_l"] = metrics::var_laplacian(mel_a);
  metrics::SsimConfig cfg;
  cfg.window = a.window;
  cfg.kind = a.gaussian ? metrics::SsimWindow::kGaussian : metrics::SsimWindow::kBox;
  std::vector<HeatPanel> panels{{"|Laplacian response|", abs_transposed(metrics::laplacian_response(mel_a)), "frame",
                                 "mel bin", std::nullopt, std::nullopt}};
  if (!a.b.empty()) {
    const auto mel_b = read_mel(a.b);
    r.add_input(a.b);
    if (mel_a.frames() != mel_b.frames() || mel_a.bins() != mel_b.bins()) {
      throw Error(ErrorCode::kShapeMismatch, fmt::format("inputs are {}x{} and {}x{}", mel_a.frames(), mel_a.bins(),
                                                         mel_b.frames(), mel_b.bins()));
    }
    r.results["var_l_b"] = metrics::var_laplacian(mel_b);
    r.results["ssim"] = metrics::ssim(mel_a, mel_b, cfg);
    panels.push_back({"SSIM map", metrics::ssim_map(mel_a, mel_b, cfg).transposed(), "frame", "mel bin", std::nullopt,
                      std::nullopt});
    r.parameters = {{"window", a.window}, {"window_kind", a.gaussian ? "gaussian" : "box"}};
  }
  write_artifact(r, a.svg, heatmap("Spectrogram metrics", panels));
  emit(r, a.out, out);
}

struct DistArgs {
  std::string manifest, phoneme, bins, joint, csv, svg, out;
  std::optional<std::size_t> bin;
  std::optional<double> bandwidth;
};

AlignedCorpus load_manifest(const std::string& path, Report& r) {
  r.add_input(path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(read_file_text(path));
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("manifest: ") + e.what());
  }
  if (!j.is_array() || j.empty()) throw Error(ErrorCode::kParse, "manifest must be a non-empty list of {mel, align}");
  const auto base = std::filesystem::path(path).parent_path();
  AlignedCorpus corpus;
  for (const auto& entry : j) {
    if (!entry.is_object() || !entry.contains("mel") || !entry.contains("align") || !entry["mel"].is_string() ||
        !entry["align"].is_string()) {
      throw Error(ErrorCode::kParse, "manifest entries need string fields mel and align");
    }
    const auto mel = base / entry["mel"].get<std::string>();
    const auto align = base / entry["align"].get<std::string>();
    corpus.push_back({read_mel(mel), read_alignment(align)});
    r.add_input(mel);
    r.add_input(align);
  }
  return corpus;
}

nlohmann::json dip_cell(const AlignedCorpus& corpus, const std::string& ph, std::size_t bin) {
  const auto values = density::phoneme_values(corpus, ph, bin);
  return {{"bin", bin}, {"samples", values.size()}, {"dip", density::dip_statistic(values).dip}};
}

void cmd_dist(const DistArgs& a, std::ostream& out) {
  const int modes = (a.bin ? 1 : 0) + (a.bins.empty() ? 0 : 1) + (a.joint.empty() ? 0 : 1);
  if (modes != 1) throw UsageError("give exactly one of --bin, --bins or --joint");
  Report r;
  r.command = "dist";
  const auto corpus = load_manifest(a.manifest, r);
  r.parameters["phoneme"] = a.phoneme;
  if (a.bandwidth) r.parameters["bandwidth"] = *a.bandwidth;
  nlohmann::json cells = nlohmann::json::array();
  std::string csv, svg;

  if (!a.joint.empty()) {
    const auto axis = parse_joint(a.joint);
    r.parameters["joint"] = a.joint;
    std::optional<std::pair<double, double>> bw;
    if (a.bandwidth) bw = std::pair{*a.bandwidth, *a.bandwidth};
    const auto d = density::phoneme_joint(corpus, a.phoneme, axis, bw);
    std::string x_label, y_label;
    if (const auto* fp = std::get_if<density::FreqPair>(&axis)) {
      cells.push_back(dip_cell(corpus, a.phoneme, fp->f1));
      if (fp->f2 != fp->f1) cells.push_back(dip_cell(corpus, a.phoneme, fp->f2));
      x_label = fmt::format("bin {} value", fp->f1);
      y_label = fmt::format("bin {} value", fp->f2);
    } else {
      const auto& tl = std::get<density::TimeLag>(axis);
      cells.push_back(dip_cell(corpus, a.phoneme, tl.f));
      x_label = fmt::format("bin {} at frame t", tl.f);
      y_label = fmt::format("bin {} at frame t+{}", tl.f, tl.lag);
    }
    csv = "x,y,density\n";
    for (std::size_t i = 0; i < d.grid_x.size(); ++i) {
      for (std::size_t j = 0; j < d.grid_y.size(); ++j) csv += fmt::format("{},{},{}\n", d.grid_x[i], d.grid_y[j], d.values(i, j));
    }
    r.results["joint"] = {{"bandwidth_x", d.bandwidth_x}, {"bandwidth_y", d.bandwidth_y},
                          {"grid_points", d.grid_x.size()}, {"mass", density::trapezoid2d(d)}};
    HeatPanel panel{"joint density", d.values.transposed(), x_label, y_label,
                    std::array{d.grid_x.front(), d.grid_x.back()}, std::array{d.grid_y.front(), d.grid_y.back()}};
    svg = heatmap(fmt::format("Joint density for phoneme {}", a.phoneme), {panel});
  } else {
    const auto bins = a.bin ? std::vector<std::size_t>{*a.bin} : parse_bins(a.bins);
    r.parameters["bins"] = bins;
    std::vector<Series> series;
    csv = bins.size() == 1 ? "x,density\n" : "bin,x,density\n";
    for (std::size_t bin : bins) {
      const auto d = density::phoneme_marginal(corpus, a.phoneme, bin, a.bandwidth);
      auto cell = dip_cell(corpus, a.phoneme, bin);
      cell["bandwidth"] = d.bandwidth;
      cells.push_back(cell);
      for (std::size_t i = 0; i < d.grid.size(); ++i) {
        csv += bins.size() == 1 ? fmt::format("{},{}\n", d.grid[i], d.values[i])
                                : fmt::format("{},{},{}\n", bin, d.grid[i], d.values[i]);
      }
      series.push_back({fmt::format("bin {}", bin), d.grid, d.values});
    }
    svg = line_chart(fmt::format("Marginal density for phoneme {}", a.phoneme), "log-mel value", "density", series);
  }
  r.results["cells"] = cells;
  write_artifact(r, a.csv, csv);
  write_artifact(r, a.svg, svg);
  emit(r, a.out, out);
}

struct ToylabArgs {
  std::string preset, spec, strategies, seed, markdown, svg, out;
  std::size_t generated = 200;
};

void cmd_toylab(const ToylabArgs& a, std::ostream& out) {
  if (!a.preset.empty() && !a.spec.empty()) throw UsageError("give either --preset or --spec, not both");
  Report r;
  r.command = "toylab";
  toylab::ToyCorpusSpec spec;
  if (!a.spec.empty()) {
    spec = toylab::spec_from_json(read_file_text(a.spec));
    r.add_input(a.spec);
    r.parameters["spec"] = a.spec;
  } else {
    const std::string preset = a.preset.empty() ? "canonical" : a.preset;
    if (preset != "canonical") throw UsageError("unknown preset '" + preset + "'; valid presets: canonical");
    spec = toylab::canonical_spec();
    r.parameters["preset"] = preset;
  }
  std::vector<toylab::Strategy> strategies;
  if (a.strategies.empty()) {
    const auto all = toylab::all_strategies();
    strategies.assign(all.begin(), all.end());
  } else {
    for (const auto& name : split(a.strategies, ',')) strategies.push_back(toylab::parse_strategy(name));
  }
  const std::uint64_t seed = resolve_seed(a.seed);
  toylab::Hyper hyper;
  hyper.generated = a.generated;
  std::vector<std::string> names;
  for (auto s : strategies) names.emplace_back(toylab::strategy_name(s));
  r.parameters["strategies"] = names;
  r.parameters["seed"] = seed;
  r.parameters["generated"] = a.generated;

  const auto report = toylab::run_experiment(spec, strategies, seed, hyper);
  r.results = nlohmann::json::parse(toylab::report_json(report));

  std::vector<std::string> categories{"ground_truth"};
  std::vector<const toylab::StrategyRow*> rows{&report.reference};
  for (const auto& row : report.rows) {
    categories.push_back(row.name);
    rows.push_back(&row);
  }
  auto column = [&](auto get) {
    std::vector<std::optional<double>> v;
    for (const auto* row : rows) v.push_back(get(*row));
    return v;
  };
  std::vector<BarPanel> panels;
  if (report.reference.var_l) panels.push_back({"Var_L", column([](const auto& x) { return x.var_l; })});
  panels.push_back({"mode coherence", column([](const auto& x) { return std::optional(x.mode_coherence); })});
  panels.push_back({"mean per-cell dip", column([](const auto& x) { return std::optional(x.dip); })});
  write_artifact(r, a.markdown, toylab::report_markdown(report));
  write_artifact(r, a.svg, bar_chart(fmt::format("Toy-lab strategies, seed {}", seed), categories, panels));
  emit(r, a.out, out);
}

struct FlowTrainArgs {
  std::vector<std::string> mels;
  std::string checkpoint, curve, svg, seed, out;
  std::size_t steps = flow::kDefaultFlowSteps;
  std::size_t hidden = flow::kDefaultHidden;
  std::size_t epochs = 40;
  std::size_t batch = 64;
  double lr = 5e-3;
};

flow::ConditionedBatch load_targets(const std::vector<std::string>& paths, Report& r) {
  flow::ConditionedBatch batch;
  for (const auto& p : paths) {
    const auto mel = read_mel(p);
    if (!batch.targets.empty() &&
        (batch.targets[0].rows() != mel.frames() || batch.targets[0].cols() != mel.bins())) {
      throw Error(ErrorCode::kShapeMismatch,
                  fmt::format("{} is {}x{} but the first input is {}x{}", p, mel.frames(), mel.bins(),
                              batch.targets[0].rows(), batch.targets[0].cols()));
    }
    batch.targets.push_back(to_grid(mel));
    r.add_input(p);
  }
  return batch;
}

void cmd_flow_train(const FlowTrainArgs& a, std::ostream& out) {
  Report r;
  r.command = "flow train";
  const auto data = load_targets(a.mels, r);
  flow::FlowConfig cfg;
  cfg.steps = a.steps;
  cfg.channels = data.targets[0].cols();
  cfg.frames = data.targets[0].rows();
  cfg.hidden = a.hidden;
  const std::uint64_t seed = resolve_seed(a.seed);
  SeededRng init(seed, kFlowInitStream);
  flow::TrainConfig tc;
  tc.epochs = a.epochs;
  tc.batch_size = a.batch;
  tc.step_size = a.lr;
  tc.seed = seed;
  const auto result = flow::train_flow(flow::make_flow(cfg, init), data, tc);
  flow::write_flow(result.model, a.checkpoint);
  r.add_output(a.checkpoint);
  r.parameters = {{"steps", a.steps}, {"hidden", a.hidden}, {"epochs", a.epochs}, {"batch", a.batch},
                  {"lr", a.lr}, {"seed", seed}};
  r.results = {{"initial_nll", result.initial_nll},
               {"final_nll", result.final_nll},
               {"final_nll_per_dim", result.final_nll / static_cast<double>(cfg.dimension())},
               {"channels", cfg.channels},
               {"frames", cfg.frames},
               {"parameter_count", result.model.parameter_count()},
               {"curve_points", result.curve.size()}};
  write_artifact(r, a.curve, flow::curve_csv(result.curve));
  Series s{"training NLL", {}, {}};
  for (const auto& p : result.curve) {
    s.x.push_back(static_cast<double>(p.step));
    s.y.push_back(p.nll);
  }
  write_artifact(r, a.svg, line_chart("Flow training curve", "epoch", "NLL (nats per sample)", {s}));
  emit(r, a.out, out);
}

struct FlowSampleArgs {
  std::string checkpoint, mel, seed, out;
  double temperature = 1.0;
};

void cmd_flow_sample(const FlowSampleArgs& a, std::ostream& out) {
  Report r;
  r.command = "flow sample";
  const auto model = flow::read_flow(a.checkpoint);
  r.add_input(a.checkpoint);
  if (model.config().cond_dim > 0) {
    throw UsageError("checkpoint expects a condition input; only unconditioned flows can be sampled here");
  }
  const std::uint64_t seed = resolve_seed(a.seed);
  SeededRng rng(seed, kFlowSampleStream);
  const Grid y = flow::sample(model, Grid(), rng, a.temperature);
  write_mel(to_spectrogram(y), a.mel);
  r.add_output(a.mel);
  r.parameters = {{"seed", seed}, {"temperature", a.temperature}};
  r.results = {{"frames", y.rows()}, {"bins", y.cols()}};
  emit(r, a.out, out);
}

struct FlowNllArgs {
  std::string checkpoint, out;
  std::vector<std::string> mels;
};

void cmd_flow_nll(const FlowNllArgs& a, std::ostream& out) {
  Report r;
  r.command = "flow nll";
  const auto model = flow::read_flow(a.checkpoint);
  r.add_input(a.checkpoint);
  const auto data = load_targets(a.mels, r);
  const auto& cfg = model.config();
  if (data.targets[0].cols() != cfg.channels || data.targets[0].rows() != cfg.frames) {
    throw Error(ErrorCode::kShapeMismatch,
                fmt::format("checkpoint expects {} frames x {} channels, inputs are {}x{}", cfg.frames, cfg.channels,
                            data.targets[0].rows(), data.targets[0].cols()));
  }
  const double value = flow::nll(model, data);
  r.results = {{"nll", value},
               {"nll_per_dim", value / static_cast<double>(cfg.dimension())},
               {"samples", data.size()}};
  emit(r, a.out, out);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"oversmooth: spectrogram over-smoothing analysis"};
  app.name("oversmooth");
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  MelArgs mel;
  auto* mel_cmd = app.add_subcommand("mel", "Extract a log-mel spectrogram (MEL1) from a WAV file");
  mel_cmd->add_option("wav", mel.wav, "Input WAV (22050 Hz, PCM16 or float)")->required();
  mel_cmd->add_option("output", mel.mel, "Output MEL1 path")->required();
  mel_cmd->add_option("--frame", mel.frame, "Frame (FFT) size")->capture_default_str();
  mel_cmd->add_option("--hop", mel.hop, "Hop size")->capture_default_str();
  mel_cmd->add_option("--bins", mel.bins, "Mel bins")->capture_default_str();
  mel_cmd->add_option("--floor", mel.floor, "Amplitude floor before the log")->capture_default_str();
  mel_cmd->add_option("--out", mel.out, "Write the report here instead of stdout");

  MetricsArgs met;
  auto* met_cmd = app.add_subcommand("metrics", "Var_L of one spectrogram, SSIM against a second");
  met_cmd->add_option("a", met.a, "MEL1 input")->required();
  met_cmd->add_option("b", met.b, "Second MEL1 input");
  met_cmd->add_flag("--ssim", met.want_ssim, "Require an SSIM comparison");
  met_cmd->add_option("--window", met.window, "SSIM window side")->capture_default_str();
  met_cmd->add_flag("--gaussian", met.gaussian, "Gaussian SSIM window instead of a box");
  met_cmd->add_option("--svg", met.svg, "Heatmaps of |Laplacian| and the SSIM map");
  met_cmd->add_option("--out", met.out, "Write the report here instead of stdout");

  DistArgs dist;
  auto* dist_cmd = app.add_subcommand("dist", "Per-phoneme densities and dip statistics");
  dist_cmd->add_option("manifest", dist.manifest, "JSON list of {mel, align} paths")->required();
  dist_cmd->add_option("--ph", dist.phoneme, "Phoneme label")->required();
  dist_cmd->add_option("--bin", dist.bin, "One frequency bin");
  dist_cmd->add_option("--bins", dist.bins, "Comma-separated frequency bins");
  dist_cmd->add_option("--joint", dist.joint, "freq:F1,F2 or time:F,LAG");
  dist_cmd->add_option("--bandwidth", dist.bandwidth, "Kernel bandwidth (default Silverman)");
  dist_cmd->add_option("--csv", dist.csv, "Density CSV output");
  dist_cmd->add_option("--svg", dist.svg, "Density figure");
  dist_cmd->add_option("--out", dist.out, "Write the report here instead of stdout");

  ToylabArgs toy;
  auto* toy_cmd = app.add_subcommand("toylab", "Synthetic over-smoothing experiment");
  toy_cmd->add_option("--preset", toy.preset, "Corpus preset (canonical)");
  toy_cmd->add_option("--spec", toy.spec, "Corpus spec JSON");
  toy_cmd->add_option("--strategies", toy.strategies, "Comma-separated strategies (default: all)");
  toy_cmd->add_option("--seed", toy.seed, "Seed (falls back to OVERSMOOTH_SEED, then 0)");
  toy_cmd->add_option("--generated", toy.generated, "Generated samples per condition")->capture_default_str();
  toy_cmd->add_option("--markdown", toy.markdown, "Markdown table output");
  toy_cmd->add_option("--svg", toy.svg, "Bar chart output");
  toy_cmd->add_option("--out", toy.out, "Write the report here instead of stdout");

  auto* flow_cmd = app.add_subcommand("flow", "Train, sample and score normalizing flows on MEL1 data");
  flow_cmd->require_subcommand(1);
  FlowTrainArgs ft;
  auto* ft_cmd = flow_cmd->add_subcommand("train", "Train a flow on equally shaped MEL1 files");
  ft_cmd->add_option("mels", ft.mels, "Training MEL1 files")->required();
  ft_cmd->add_option("-o,--checkpoint", ft.checkpoint, "Output FLW1 checkpoint")->required();
  ft_cmd->add_option("--steps", ft.steps, "Flow steps")->capture_default_str();
  ft_cmd->add_option("--hidden", ft.hidden, "Coupling hidden width")->capture_default_str();
  ft_cmd->add_option("--epochs", ft.epochs, "Epochs")->capture_default_str();
  ft_cmd->add_option("--batch", ft.batch, "Minibatch size")->capture_default_str();
  ft_cmd->add_option("--lr", ft.lr, "Adam step size")->capture_default_str();
  ft_cmd->add_option("--seed", ft.seed, "Seed (falls back to OVERSMOOTH_SEED, then 0)");
  ft_cmd->add_option("--curve", ft.curve, "Training curve CSV");
  ft_cmd->add_option("--svg", ft.svg, "Training curve figure");
  ft_cmd->add_option("--out", ft.out, "Write the report here instead of stdout");
  FlowSampleArgs fs;
  auto* fs_cmd = flow_cmd->add_subcommand("sample", "Draw one MEL1 sample from a checkpoint");
  fs_cmd->add_option("checkpoint", fs.checkpoint, "FLW1 checkpoint")->required();
  fs_cmd->add_option("-o,--output", fs.mel, "Output MEL1 path")->required();
  fs_cmd->add_option("--seed", fs.seed, "Seed (falls back to OVERSMOOTH_SEED, then 0)");
  fs_cmd->add_option("--temperature", fs.temperature, "Prior temperature")->capture_default_str();
  fs_cmd->add_option("--out", fs.out, "Write the report here instead of stdout");
  FlowNllArgs fn;
  auto* fn_cmd = flow_cmd->add_subcommand("nll", "Mean NLL of MEL1 files under a checkpoint");
  fn_cmd->add_option("checkpoint", fn.checkpoint, "FLW1 checkpoint")->required();
  fn_cmd->add_option("mels", fn.mels, "MEL1 files")->required();
  fn_cmd->add_option("--out", fn.out, "Write the report here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (mel_cmd->parsed()) cmd_mel(mel, out);
    if (met_cmd->parsed()) cmd_metrics(met, out);
    if (dist_cmd->parsed()) cmd_dist(dist, out);
    if (toy_cmd->parsed()) cmd_toylab(toy, out);
    if (ft_cmd->parsed()) cmd_flow_train(ft, out);
    if (fs_cmd->parsed()) cmd_flow_sample(fs, out);
    if (fn_cmd->parsed()) cmd_flow_nll(fn, out);
  } catch (const UsageError& e) {
    err << "oversmooth: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "oversmooth: " << e.what() << "\n";
    return e.code() == ErrorCode::kDivergence ? 1 : 2;
  } catch (const std::exception& e) {
    err << "oversmooth: internal error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace oversmooth::cli
