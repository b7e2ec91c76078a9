// src/evaluate.cc

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

#include "sise/evaluate.h"

#include <cmath>
#include <filesystem>
#include <map>

#include "sise/process.h"
#include "sise/stoi.h"
#include "sise/track.h"
#include "sise/wav-io.h"

namespace sise {

namespace fs = std::filesystem;

double SignalToErrorDb(std::span<const double> clean, std::span<const double> estimate) {
  Require(clean.size() == estimate.size(), ErrorKind::kInvalidInput, "length mismatch");
  std::vector<double> err(clean.size());
  for (size_t i = 0; i < clean.size(); ++i) err[i] = estimate[i] - clean[i];
  return MeasureSnr(clean, err);
}

namespace {

struct Condition {
  std::string noise;
  std::optional<double> snr;
  bool operator<(const Condition &o) const {
    if (noise != o.noise) return noise < o.noise;
    return snr.value_or(-1e300) < o.snr.value_or(-1e300);
  }
};

}  // namespace

EvaluationResult EvaluateModel(const SiseModel &model, const CorpusManifest &manifest,
                               const EvaluationOptions &options, const SiseModel *preprocessor) {
  std::map<Condition, std::vector<ManifestEntry>> groups;
  for (const ManifestEntry &e : manifest.Select(options.split, true, true)) {
    Condition c{"clean", std::nullopt};
    if (e.IsAugmented()) c = {NoiseKindName(*e.noise_kind), e.snr_db};
    groups[c].push_back(e);
  }
  Require(!groups.empty(), ErrorKind::kInvalidInput,
          "no " + SplitName(options.split) + " entries to evaluate");

  std::string work_dir = options.work_dir;
  const bool external = options.scorer.Configured() && options.score_se;
  bool temp_dir = false;
  if (external && work_dir.empty()) {
    work_dir = MakeTempDir("sise-eval");
    temp_dir = true;
  }
  if (!work_dir.empty()) fs::create_directories(work_dir);

  EvaluationResult result;
  for (const auto &[cond, entries] : groups) {
    ReportCell cell{options.scenario_label, cond.noise, cond.snr, {}, static_cast<int>(entries.size())};
    ReportCell noisy_cell{"noisy", cond.noise, cond.snr, {}, static_cast<int>(entries.size())};
    std::vector<Matrix> est, ref;
    double stoi_sum = 0.0, stoi_noisy_sum = 0.0;
    std::map<std::string, double> ext_sum, ext_noisy_sum;
    std::string ext_status = "unavailable";
    for (const ManifestEntry &e : entries) {
      Waveform clean = ReadWavAt16k(manifest.Resolve(e.clean_path));
      Waveform input = clean;
      if (e.IsAugmented()) {
        input = ReadWavAt16k(manifest.Resolve(*e.noisy_path));
        for (double &s : clean.samples) s *= e.mix_gain;
      }
      if (options.score_si) {
        const Waveform heard = preprocessor ? preprocessor->Enhance(input).enhanced : input;
        const ArticulatoryTrack track = ReadTrack(manifest.Resolve(e.track_path));
        Matrix pred = model.Invert(heard).channels;
        const long frames = std::min(pred.rows(), track.channels.rows());
        Require(std::abs(pred.rows() - track.channels.rows()) <= 1, ErrorKind::kCorruptEntry,
                e.Key() + ": track length disagrees with the audio");
        est.push_back(pred.topRows(frames));
        ref.push_back(track.channels.topRows(frames));
      }
      if (options.score_se && e.IsAugmented()) {
        const Waveform enhanced = model.Enhance(input).enhanced;
        UtteranceScore u;
        u.key = e.Key();
        u.noise = cond.noise;
        u.snr_db = cond.snr.value_or(0.0);
        u.input_snr_db = SignalToErrorDb(clean.samples, input.samples);
        u.output_snr_db = SignalToErrorDb(clean.samples, enhanced.samples);
        u.stoi_noisy = Stoi(clean, input);
        u.stoi_enhanced = Stoi(clean, enhanced);
        stoi_sum += u.stoi_enhanced;
        stoi_noisy_sum += u.stoi_noisy;
        result.utterances.push_back(u);
        if (external) {
          const std::string stem = (fs::path(work_dir) / u.key).string();
          WriteWav(stem + ".clean.wav", clean);
          WriteWav(stem + ".enhanced.wav", enhanced);
          const ExternalScores s =
              RunExternalScorer(options.scorer, stem + ".clean.wav", stem + ".enhanced.wav");
          ext_status = s.status;
          for (const auto &[k, v] : s.values) ext_sum[k] += v;
          if (options.noisy_baseline) {
            const ExternalScores sn =
                RunExternalScorer(options.scorer, stem + ".clean.wav", manifest.Resolve(*e.noisy_path));
            for (const auto &[k, v] : sn.values) ext_noisy_sum[k] += v;
          }
        }
      }
    }
    if (options.score_si) cell.AddPpmc(ComputePpmc(est, ref, options.ppmc_mode));
    const double n = static_cast<double>(entries.size());
    if (options.score_se && cond.snr) {
      SeReport se, se_noisy;
      se.stoi = stoi_sum / n;
      se_noisy.stoi = stoi_noisy_sum / n;
      ExternalScores mean, mean_noisy;
      mean.status = mean_noisy.status = ext_status;
      for (const auto &[k, v] : ext_sum) mean.values[k] = v / n;
      for (const auto &[k, v] : ext_noisy_sum) mean_noisy.values[k] = v / n;
      se.MergeExternal(mean);
      se_noisy.MergeExternal(mean_noisy);
      cell.AddSe(se);
      noisy_cell.AddSe(se_noisy);
    }
    result.cells.push_back(std::move(cell));
    if (options.noisy_baseline && options.score_se && cond.snr) result.cells.push_back(noisy_cell);
  }
  if (temp_dir) fs::remove_all(work_dir);
  return result;
}

}  // namespace sise
