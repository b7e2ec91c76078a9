// tools/sise-main.cc

// Copyright 2026  The SISE Toolkit Authors

// See ../../COPYING for clarification regarding multiple authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Command suite: augment, train, enhance, invert, evaluate, report.
//
// Exit codes: 0 success, 2 usage error, 3 data error, 4 state error.

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "sise/augment.h"
#include "sise/checkpoint.h"
#include "sise/evaluate.h"
#include "sise/figure.h"
#include "sise/report.h"
#include "sise/toy-corpus.h"
#include "sise/trainer.h"
#include "sise/wav-io.h"

namespace fs = std::filesystem;
using nlohmann::json;

namespace sise {
namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitState = 4;

int ExitCodeFor(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kIncompatibleCheckpoint:
    case ErrorKind::kInvalidState:
      return kExitState;
    default:
      return kExitData;
  }
}

struct GlobalOptions {
  std::string config_root;
  std::string output_format = "csv";
  int verbosity = 0;
};

GlobalOptions g_opts;

void Log(const std::string &msg) {
  if (g_opts.verbosity > 0) std::cerr << "sise: " << msg << '\n';
}

std::string ResolveConfigPath(const std::string &path) {
  if (path.empty() || fs::path(path).is_absolute() || fs::exists(path) || g_opts.config_root.empty())
    return path;
  return (fs::path(g_opts.config_root) / path).string();
}

json ReadJsonFile(const std::string &path) {
  std::ifstream in(path);
  Require(static_cast<bool>(in), ErrorKind::kIoError, "cannot open " + path);
  try {
    return json::parse(in);
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kInvalidInput, path + ": " + e.what());
  }
}

void WriteText(const std::string &path, const std::string &text) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::trunc);
  Require(static_cast<bool>(out), ErrorKind::kIoError, "cannot write " + path);
  out << text;
}

void WriteSnapshot(const std::string &path, const std::string &command, json resolved) {
  json j = {{"command", command}, {"resolved", std::move(resolved)}};
  WriteText(path, j.dump(2) + "\n");
}

std::string UtcStamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
  return os.str();
}

// ---- augment ------------------------------------------------------------

struct ToyArgs {
  int n = 64;
  uint64_t seed = 0;
  double duration = 1.0;
  std::string out = "toy-corpus";
  int babble_pool = 24;
  int nonbabble_pool = 4;
  std::string track_ext = ".csv";
};

int RunAugmentToy(const ToyArgs &a) {
  ToyCorpusOptions o;
  o.num_utterances = a.n;
  o.seed = a.seed;
  o.duration_s = a.duration;
  o.babble_pool_size = a.babble_pool;
  o.nonbabble_pool_size = a.nonbabble_pool;
  o.track_extension = a.track_ext;
  ToyCorpusPaths paths;
  const CorpusManifest m = GenerateToyCorpus(o, a.out, &paths);
  WriteSnapshot((fs::path(a.out) / "resolved_config.json").string(), "augment toy",
                {{"n", a.n}, {"seed", a.seed}, {"duration_s", a.duration},
                 {"babble_pool_size", a.babble_pool}, {"nonbabble_pool_size", a.nonbabble_pool},
                 {"track_extension", a.track_ext}, {"manifest", paths.manifest},
                 {"manifest_digest", m.Digest()}});
  std::cout << paths.manifest << '\n';
  return kExitOk;
}

struct BuildArgs {
  std::string manifest;
  std::string babble_pool, nonbabble_pool;
  std::string train_babble_pool, train_nonbabble_pool;
  std::vector<double> snr_range = {0.0, 10.0};
  std::vector<double> snr_levels = {-5.0, 0.0, 5.0, 10.0};
  uint64_t seed = 0;
  std::string out;
};

std::vector<std::string> LoadPool(const std::string &list, const std::string &what) {
  Require(!list.empty(), ErrorKind::kInsufficientPool, "no " + what + " pool given");
  std::vector<std::string> pool = ReadPoolList(list);
  Require(!pool.empty(), ErrorKind::kInsufficientPool, what + " pool " + list + " is empty");
  return pool;
}

int RunAugmentBuild(const BuildArgs &a, bool test) {
  const CorpusManifest clean = ReadManifest(a.manifest);
  NoiseSpec babble{NoiseKind::kBabble, LoadPool(a.babble_pool, "babble"), {}, DeriveSeed(a.seed, "babble")};
  NoiseSpec nonbabble{NoiseKind::kNonBabble, LoadPool(a.nonbabble_pool, "nonbabble"), {},
                      DeriveSeed(a.seed, "nonbabble")};
  const std::string out = a.out.empty() ? (test ? "test-corpus" : "train-corpus") : a.out;
  json resolved = {{"manifest", a.manifest}, {"babble_pool", a.babble_pool},
                   {"nonbabble_pool", a.nonbabble_pool}, {"seed", a.seed}, {"out", out}};
  CorpusManifest result;
  if (test) {
    std::vector<std::string> train_pools;
    for (const std::string &list : {a.train_babble_pool, a.train_nonbabble_pool}) {
      if (list.empty()) continue;
      const std::vector<std::string> p = ReadPoolList(list);
      train_pools.insert(train_pools.end(), p.begin(), p.end());
    }
    babble.snr = nonbabble.snr = SnrPolicy::Fixed(a.snr_levels);
    resolved["snr_levels"] = a.snr_levels;
    resolved["train_babble_pool"] = a.train_babble_pool;
    resolved["train_nonbabble_pool"] = a.train_nonbabble_pool;
    result = BuildTest(clean, babble, nonbabble, train_pools, {out, a.seed});
  } else {
    Require(a.snr_range.size() == 2, ErrorKind::kInvalidInput, "--snr-range takes lo,hi");
    babble.snr = nonbabble.snr = SnrPolicy::Uniform(a.snr_range[0], a.snr_range[1]);
    resolved["snr_range"] = a.snr_range;
    result = BuildTrainDev(clean, babble, nonbabble, {out, a.seed});
  }
  const std::string manifest_path = (fs::path(out) / "manifest.jsonl").string();
  WriteManifest(manifest_path, result);
  resolved["manifest_digest"] = result.Digest();
  WriteSnapshot((fs::path(out) / "resolved_config.json").string(),
                test ? "augment build-test" : "augment build-train", resolved);
  std::cout << manifest_path << '\n';
  return kExitOk;
}

// ---- train --------------------------------------------------------------

struct TrainArgs {
  std::string scenario;
  std::string config;
  std::optional<uint64_t> seed;
  int stage = 0;
  std::string manifest;
  std::string run_root = "runs";
  std::string run_name;
  std::string se_base;
  std::string stage1_checkpoint;
  std::optional<int> max_epochs;
  std::optional<int> batch_size;
  std::optional<int> hidden;
  bool cache_enhanced = false;
};

int RunTrain(const TrainArgs &a) {
  TrainConfig cfg;
  if (!a.config.empty()) cfg = ReadJsonFile(ResolveConfigPath(a.config)).get<TrainConfig>();
  if (!a.scenario.empty()) {
    try {
      cfg.scenario = ParseScenario(a.scenario);
    } catch (const Error &e) {
      std::cerr << "sise train: " << e.what() << '\n';
      return kExitUsage;
    }
  }
  if (a.seed) cfg.seed = cfg.model.seed = *a.seed;
  if (a.stage) cfg.only_stage = a.stage;
  if (!a.manifest.empty()) cfg.manifest = a.manifest;
  if (!a.se_base.empty()) cfg.se_base_checkpoint = a.se_base;
  if (!a.stage1_checkpoint.empty()) cfg.stage1_checkpoint = a.stage1_checkpoint;
  if (a.max_epochs) cfg.max_epochs = *a.max_epochs;
  if (a.batch_size) cfg.batch.batch_size = *a.batch_size;
  if (a.hidden) cfg.model.se_hidden = cfg.model.si_hidden = *a.hidden;
  if (a.cache_enhanced) cfg.cache_enhanced = true;
  const std::string name = a.run_name.empty()
      ? ScenarioName(cfg.scenario) + "-seed" + std::to_string(cfg.seed) + "-" + UtcStamp()
      : a.run_name;
  cfg.run_dir = (fs::path(a.run_root) / name).string();
  cfg.Validate();
  fs::create_directories(cfg.run_dir);
  WriteSnapshot((fs::path(cfg.run_dir) / "resolved_config.json").string(), "train", cfg);
  Log("training " + ScenarioName(cfg.scenario) + " into " + cfg.run_dir);
  const TrainResult r = TrainScenario(cfg);
  for (const RunRecord &rec : r.records) {
    Log("stage " + std::to_string(rec.stage) + ": best epoch " + std::to_string(rec.best_epoch) +
        ", dev loss " + std::to_string(rec.best_dev_loss));
  }
  std::cout << r.final_checkpoint << '\n';
  return kExitOk;
}

// ---- enhance / invert ---------------------------------------------------

SiseModel LoadForInference(const std::string &path, const std::vector<int> &geometry) {
  if (geometry.empty()) return LoadCheckpoint(path);
  Require(geometry.size() == 2, ErrorKind::kInvalidInput, "--geometry takes fft,hop");
  ModelConfig expected = ReadCheckpointHeader(path).at("config").get<ModelConfig>();
  expected.geometry = SpectrogramGeometry::Make(geometry[0], geometry[1]);
  return LoadCheckpoint(path, &expected);
}

struct InferArgs {
  std::string checkpoint;
  std::string input;
  std::string output;
  std::string preprocessor;
  std::vector<int> geometry;
};

int RunEnhance(const InferArgs &a) {
  const SiseModel model = LoadForInference(a.checkpoint, a.geometry);
  const Waveform original = ReadWav(a.input);
  const Waveform enhanced = model.Enhance(ReadWavAt16k(a.input)).enhanced;
  const Waveform out = original.sample_rate == enhanced.sample_rate
      ? enhanced
      : Resample(enhanced, original.sample_rate, static_cast<long>(original.size()));
  WriteWav(a.output, out);
  WriteSnapshot(a.output + ".config.json", "enhance",
                {{"checkpoint", a.checkpoint}, {"input", a.input}, {"output", a.output},
                 {"geometry", a.geometry}});
  return kExitOk;
}

int RunInvert(const InferArgs &a) {
  const SiseModel model = LoadForInference(a.checkpoint, a.geometry);
  Waveform wave = ReadWavAt16k(a.input);
  if (!a.preprocessor.empty()) wave = LoadCheckpoint(a.preprocessor).Enhance(wave).enhanced;
  WriteTrack(a.output, model.Invert(wave));
  WriteSnapshot(a.output + ".config.json", "invert",
                {{"checkpoint", a.checkpoint}, {"input", a.input}, {"output", a.output},
                 {"preprocessor", a.preprocessor}, {"geometry", a.geometry}});
  return kExitOk;
}

// ---- evaluate -----------------------------------------------------------

struct EvalArgs {
  std::string checkpoint;
  std::string manifest;
  std::string train_manifest;
  std::string label;
  std::string preprocessor;
  std::string scorer_cmd;
  int scorer_timeout = 120;
  std::string ppmc_mode = "corpus";
  bool noisy_baseline = false;
  std::string out = "eval";
};

void CheckNoOverlap(const CorpusManifest &test, const CorpusManifest &train) {
  std::set<std::string> seen;
  for (const ManifestEntry &e : train.entries) seen.insert(e.utterance_id);
  for (const ManifestEntry &e : test.Select(Split::kTest, true, true)) {
    Require(!seen.count(e.utterance_id), ErrorKind::kContaminatedEvaluation,
            "test utterance " + e.utterance_id + " also appears in the training manifest");
  }
}

int RunEvaluate(const EvalArgs &a) {
  json extra;
  const SiseModel model = LoadCheckpoint(a.checkpoint, nullptr, &extra);
  const CorpusManifest manifest = ReadManifest(a.manifest);
  if (!a.train_manifest.empty()) CheckNoOverlap(manifest, ReadManifest(a.train_manifest));
  const std::string scenario_name = extra.value("scenario", std::string("sise-m"));
  const Scenario scenario = ParseScenario(scenario_name);

  std::optional<SiseModel> pre;
  if (!a.preprocessor.empty()) pre.emplace(LoadCheckpoint(a.preprocessor));
  Require(scenario != Scenario::kSisePipeline || pre.has_value(), ErrorKind::kInvalidState,
          "SISE-P evaluation needs --preprocessor (the SE-Base checkpoint)");

  EvaluationOptions o;
  o.scenario_label = a.label.empty() ? scenario_name : a.label;
  o.score_si = ScenarioTrainsSi(scenario);
  o.score_se = ScenarioTrainsSe(scenario) && scenario != Scenario::kSisePipeline;
  o.noisy_baseline = a.noisy_baseline;
  o.ppmc_mode = ParsePpmcMode(a.ppmc_mode);
  o.scorer = {a.scorer_cmd, a.scorer_timeout};
  if (o.scorer.Configured()) o.work_dir = (fs::path(a.out) / "audio").string();

  const EvaluationResult r = EvaluateModel(model, manifest, o, pre ? &*pre : nullptr);
  fs::create_directories(a.out);
  WriteText((fs::path(a.out) / "cells.json").string(), json(r.cells).dump(2) + "\n");
  std::string per_utt;
  for (const UtteranceScore &u : r.utterances) {
    per_utt += json{{"key", u.key}, {"noise", u.noise}, {"snr_db", u.snr_db},
                    {"input_snr_db", u.input_snr_db}, {"output_snr_db", u.output_snr_db},
                    {"stoi_noisy", u.stoi_noisy}, {"stoi_enhanced", u.stoi_enhanced}}.dump() + "\n";
  }
  WriteText((fs::path(a.out) / "utterances.jsonl").string(), per_utt);
  const ReportTable table{r.cells, {}};
  const bool as_json = g_opts.output_format == "json";
  const std::string body = as_json ? TableToJson(table).dump(2) + "\n" : TableToCsv(table);
  WriteText((fs::path(a.out) / (as_json ? "table.json" : "table.csv")).string(), body);
  WriteSnapshot((fs::path(a.out) / "resolved_config.json").string(), "evaluate",
                {{"checkpoint", a.checkpoint}, {"manifest", a.manifest},
                 {"manifest_digest", manifest.Digest()}, {"label", o.scenario_label},
                 {"preprocessor", a.preprocessor}, {"scorer_command", a.scorer_cmd},
                 {"scorer_timeout_s", a.scorer_timeout}, {"ppmc_mode", a.ppmc_mode},
                 {"noisy_baseline", a.noisy_baseline}});
  std::cout << body;
  return kExitOk;
}

// ---- report -------------------------------------------------------------

struct ReportArgs {
  std::vector<std::string> cells;
  std::vector<std::string> scenarios;
  std::vector<std::string> noises = {"babble", "nonbabble"};
  std::vector<double> snrs = {-5.0, 0.0, 5.0, 10.0};
  std::vector<std::string> improve;        // new:base:metric
  std::vector<std::string> noise_improve;  // scenario:snr:new_noise:base_noise:metric
  std::string out = "report";
  // Figure.
  std::string figure;
  std::string channel = "TTCD";
  std::string manifest;
  std::string noise = "nonbabble";
  double snr = 0.0;
  std::string se_checkpoint;
  std::vector<std::string> si_checkpoints;  // label=path
};

std::vector<std::string> SplitOn(const std::string &s, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

void RenderComparisonFigure(const ReportArgs &a) {
  Require(!a.manifest.empty() && !a.se_checkpoint.empty(), ErrorKind::kInvalidInput,
          "--figure needs --manifest and --se-checkpoint");
  const int channel = TrackChannelIndex(a.channel);
  const CorpusManifest manifest = ReadManifest(a.manifest);
  const ManifestEntry *entry = nullptr;
  for (const ManifestEntry &e : manifest.entries) {
    if (e.utterance_id == a.figure && e.IsAugmented() && NoiseKindName(*e.noise_kind) == a.noise &&
        std::abs(*e.snr_db - a.snr) < 1e-9) {
      entry = &e;
    }
  }
  Require(entry != nullptr, ErrorKind::kInvalidInput,
          "no " + a.noise + " variant of " + a.figure + " at the requested SNR");
  FigureInput in;
  in.utterance_id = a.figure;
  in.channel = a.channel;
  in.clean = ReadWavAt16k(manifest.Resolve(entry->clean_path));
  for (double &s : in.clean.samples) s *= entry->mix_gain;
  in.noisy = ReadWavAt16k(manifest.Resolve(*entry->noisy_path));
  in.enhanced = LoadCheckpoint(a.se_checkpoint).Enhance(in.noisy).enhanced;
  const Matrix truth = ReadTrack(manifest.Resolve(entry->track_path)).channels;
  auto column = [&](const Matrix &m) {
    std::vector<double> v(m.rows());
    for (long t = 0; t < m.rows(); ++t) v[t] = m(t, channel);
    return v;
  };
  in.series.push_back({"ground truth", column(truth)});
  for (const std::string &spec : a.si_checkpoints) {
    const auto eq = spec.find('=');
    Require(eq != std::string::npos, ErrorKind::kInvalidInput, "--si-checkpoint takes label=path");
    const SiseModel si = LoadCheckpoint(spec.substr(eq + 1));
    in.series.push_back({spec.substr(0, eq), column(si.Invert(in.noisy).channels)});
  }
  const std::string stem = (fs::path(a.out) / ("figure-" + a.figure)).string();
  fs::create_directories(a.out);
  const FigureLayout layout = RenderFigure(in, stem + ".png");
  WriteText(stem + ".json", json(layout).dump(2) + "\n");
  std::cout << stem << ".png\n";
}

int RunReport(const ReportArgs &a) {
  json resolved = {{"cells", a.cells}, {"scenarios", a.scenarios}, {"noises", a.noises},
                   {"snrs", a.snrs}, {"improve", a.improve}, {"noise_improve", a.noise_improve},
                   {"output_format", g_opts.output_format}};
  if (!a.figure.empty()) {
    RenderComparisonFigure(a);
    resolved["figure"] = {{"utterance", a.figure}, {"channel", a.channel}, {"manifest", a.manifest},
                          {"noise", a.noise}, {"snr_db", a.snr}, {"se_checkpoint", a.se_checkpoint},
                          {"si_checkpoints", a.si_checkpoints}};
  }
  if (!a.cells.empty() || a.figure.empty()) {
    std::vector<ReportCell> cells;
    for (const std::string &path : a.cells) {
      const std::vector<ReportCell> part = ReadJsonFile(path).get<std::vector<ReportCell>>();
      cells.insert(cells.end(), part.begin(), part.end());
    }
    std::vector<std::string> scenarios = a.scenarios;
    if (scenarios.empty()) {
      for (const ReportCell &c : cells) {
        if (std::find(scenarios.begin(), scenarios.end(), c.scenario) == scenarios.end())
          scenarios.push_back(c.scenario);
      }
    }
    const ReportTable table = BuildGrid(scenarios, a.noises, a.snrs, cells);
    Require(table.gaps.size() < table.rows.size(), ErrorKind::kInvalidInput,
            "none of the requested report cells has evaluation data");
    for (const std::string &gap : table.gaps) std::cerr << "sise report: no data for " << gap << '\n';
    const bool as_json = g_opts.output_format == "json";
    const std::string body = as_json ? TableToJson(table).dump(2) + "\n" : TableToCsv(table);
    WriteText((fs::path(a.out) / (as_json ? "table.json" : "table.csv")).string(), body);
    std::cout << body;

    std::vector<ImprovementRow> rows;
    for (const std::string &spec : a.improve) {
      const std::vector<std::string> f = SplitOn(spec, ':');
      Require(f.size() == 3, ErrorKind::kInvalidInput, "--improve takes new:base:metric");
      const auto part = RelativeImprovements(cells, f[0], f[1], f[2]);
      rows.insert(rows.end(), part.begin(), part.end());
    }
    for (const std::string &spec : a.noise_improve) {
      const std::vector<std::string> f = SplitOn(spec, ':');
      Require(f.size() == 5, ErrorKind::kInvalidInput,
              "--noise-improve takes scenario:snr:new_noise:base_noise:metric");
      rows.push_back(NoiseImprovement(cells, f[0], std::stod(f[1]), f[2], f[3], f[4]));
    }
    if (!rows.empty()) {
      const std::string text = as_json ? json(rows).dump(2) + "\n" : ImprovementsToCsv(rows);
      WriteText((fs::path(a.out) / (as_json ? "improvements.json" : "improvements.csv")).string(), text);
      std::cout << text;
    }
  }
  WriteSnapshot((fs::path(a.out) / "resolved_config.json").string(), "report", resolved);
  return kExitOk;
}

}  // namespace
}  // namespace sise

int main(int argc, char **argv) {
  using namespace sise;
  CLI::App app{"Joint speech enhancement and speech inversion toolkit"};
  app.require_subcommand(1);
  if (const char *root = std::getenv("SISE_CONFIG_ROOT")) g_opts.config_root = root;
  app.add_option("--config-root", g_opts.config_root,
                 "Directory for relative config paths (default: $SISE_CONFIG_ROOT)");
  app.add_option("--output-format", g_opts.output_format, "Table format")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_flag("-v,--verbose", g_opts.verbosity, "Log progress to stderr");

  std::function<int()> action;

  CLI::App *augment = app.add_subcommand("augment", "Build corpora");
  augment->require_subcommand(1);
  ToyArgs toy;
  CLI::App *toy_cmd = augment->add_subcommand("toy", "Generate a synthetic toy corpus");
  toy_cmd->add_option("--n", toy.n, "Number of utterances")->check(CLI::PositiveNumber);
  toy_cmd->add_option("--seed", toy.seed);
  toy_cmd->add_option("--duration", toy.duration, "Utterance length in seconds");
  toy_cmd->add_option("--out", toy.out, "Output root");
  toy_cmd->add_option("--babble-pool-size", toy.babble_pool);
  toy_cmd->add_option("--nonbabble-pool-size", toy.nonbabble_pool);
  toy_cmd->add_option("--track-ext", toy.track_ext)->check(CLI::IsMember({".csv", ".tsv", ".bin"}));
  toy_cmd->callback([&] { action = [&] { return RunAugmentToy(toy); }; });

  BuildArgs build;
  for (const bool test : {false, true}) {
    CLI::App *cmd = augment->add_subcommand(test ? "build-test" : "build-train",
                                            test ? "Mix the fixed-SNR test matrix"
                                                 : "Mix train/dev variants");
    cmd->add_option("--manifest", build.manifest, "Clean corpus manifest")->required();
    cmd->add_option("--babble-pool", build.babble_pool, "List file of babble source audio");
    cmd->add_option("--nonbabble-pool", build.nonbabble_pool, "List file of non-babble noise");
    if (test) {
      cmd->add_option("--train-babble-pool", build.train_babble_pool);
      cmd->add_option("--train-nonbabble-pool", build.train_nonbabble_pool);
      cmd->add_option("--snr-levels", build.snr_levels)->delimiter(',');
    } else {
      cmd->add_option("--snr-range", build.snr_range, "lo,hi in dB")->delimiter(',');
    }
    cmd->add_option("--seed", build.seed);
    cmd->add_option("--out", build.out, "Output root");
    cmd->callback([&, test] { action = [&, test] { return RunAugmentBuild(build, test); }; });
  }

  TrainArgs train;
  CLI::App *train_cmd = app.add_subcommand("train", "Train one scenario");
  train_cmd->add_option("--scenario", train.scenario, "si-o, se-base, sise-p or sise-m");
  train_cmd->add_option("--config", train.config, "Training config (JSON)");
  train_cmd->add_option("--seed", train.seed);
  train_cmd->add_option("--stage", train.stage, "Run only this stage")->check(CLI::Range(1, 2));
  train_cmd->add_option("--manifest", train.manifest, "Train/dev manifest");
  train_cmd->add_option("--run-root", train.run_root, "Parent of the run directory");
  train_cmd->add_option("--run-name", train.run_name, "Run directory name");
  train_cmd->add_option("--se-base", train.se_base, "SE-Base checkpoint (SISE-P)");
  train_cmd->add_option("--stage1-checkpoint", train.stage1_checkpoint);
  train_cmd->add_option("--max-epochs", train.max_epochs);
  train_cmd->add_option("--batch-size", train.batch_size);
  train_cmd->add_option("--hidden", train.hidden, "Recurrent width of both heads");
  train_cmd->add_flag("--cache-enhanced", train.cache_enhanced);
  train_cmd->callback([&] { action = [&] { return RunTrain(train); }; });

  InferArgs infer;
  for (const bool inv : {false, true}) {
    CLI::App *cmd = app.add_subcommand(inv ? "invert" : "enhance",
                                       inv ? "Estimate articulatory tracks" : "Enhance a wav file");
    cmd->add_option("--checkpoint", infer.checkpoint)->required()->check(CLI::ExistingFile);
    cmd->add_option("--input", infer.input)->required()->check(CLI::ExistingFile);
    cmd->add_option("--output", infer.output)->required();
    cmd->add_option("--geometry", infer.geometry, "Expected fft,hop")->delimiter(',');
    if (inv) cmd->add_option("--preprocessor", infer.preprocessor, "SE checkpoint run first");
    cmd->callback([&, inv] { action = [&, inv] { return inv ? RunInvert(infer) : RunEnhance(infer); }; });
  }

  EvalArgs eval;
  CLI::App *eval_cmd = app.add_subcommand("evaluate", "Score a checkpoint on a test manifest");
  eval_cmd->add_option("--checkpoint", eval.checkpoint)->required();
  eval_cmd->add_option("--manifest", eval.manifest)->required();
  eval_cmd->add_option("--train-manifest", eval.train_manifest, "Checked for overlap with the test set");
  eval_cmd->add_option("--label", eval.label, "Scenario label of the emitted rows");
  eval_cmd->add_option("--preprocessor", eval.preprocessor, "SE-Base checkpoint (SISE-P)");
  eval_cmd->add_option("--scorer-cmd", eval.scorer_cmd, "External scorer, with {clean} and {degraded}");
  eval_cmd->add_option("--scorer-timeout", eval.scorer_timeout);
  eval_cmd->add_option("--ppmc-mode", eval.ppmc_mode)->check(CLI::IsMember({"corpus", "per-utterance"}));
  eval_cmd->add_flag("--noisy-baseline", eval.noisy_baseline);
  eval_cmd->add_option("--out", eval.out);
  eval_cmd->callback([&] { action = [&] { return RunEvaluate(eval); }; });

  ReportArgs rep;
  CLI::App *rep_cmd = app.add_subcommand("report", "Assemble tables and figures");
  rep_cmd->add_option("--cells", rep.cells, "cells.json from evaluate (repeatable)");
  rep_cmd->add_option("--scenarios", rep.scenarios)->delimiter(',');
  rep_cmd->add_option("--noises", rep.noises)->delimiter(',');
  rep_cmd->add_option("--snrs", rep.snrs)->delimiter(',');
  rep_cmd->add_option("--improve", rep.improve, "new:base:metric");
  rep_cmd->add_option("--noise-improve", rep.noise_improve, "scenario:snr:new_noise:base_noise:metric");
  rep_cmd->add_option("--out", rep.out);
  rep_cmd->add_option("--figure", rep.figure, "Utterance id for the comparison figure");
  rep_cmd->add_option("--channel", rep.channel, "Trajectory channel of the figure");
  rep_cmd->add_option("--manifest", rep.manifest);
  rep_cmd->add_option("--noise", rep.noise);
  rep_cmd->add_option("--snr", rep.snr);
  rep_cmd->add_option("--se-checkpoint", rep.se_checkpoint);
  rep_cmd->add_option("--si-checkpoint", rep.si_checkpoints, "label=path (repeatable)");
  rep_cmd->callback([&] { action = [&] { return RunReport(rep); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }
  try {
    return action();
  } catch (const Error &e) {
    std::cerr << "sise: " << e.what() << '\n';
    return ExitCodeFor(e.kind());
  } catch (const std::exception &e) {
    std::cerr << "sise: " << e.what() << '\n';
    return kExitData;
  }
}
