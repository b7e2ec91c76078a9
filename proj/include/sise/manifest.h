// sise/manifest.h

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

#ifndef SISE_MANIFEST_H_
#define SISE_MANIFEST_H_

#include <optional>
#include <string>
#include <vector>

#include "sise/signal.h"

namespace sise {

enum class Split { kTrain, kDev, kTest };
enum class NoiseKind { kBabble, kNonBabble, kCombined };

std::string SplitName(Split s);
Split ParseSplit(const std::string &s);
std::string NoiseKindName(NoiseKind k);
NoiseKind ParseNoiseKind(const std::string &s);

struct ManifestEntry {
  std::string utterance_id;
  Split split = Split::kTrain;
  std::string clean_path;
  std::optional<std::string> noisy_path;
  std::optional<NoiseKind> noise_kind;
  std::optional<double> snr_db;
  /// Peak-normalization gain applied to clean and noise alike (1 if none).
  double mix_gain = 1.0;
  std::string track_path;
  double duration_s = 0.0;

  bool IsAugmented() const { return noisy_path.has_value(); }
  /// (id, noise kind, snr) identity used for uniqueness.
  std::string Key() const;
};

struct ManifestMetadata {
  std::string toolkit_version = "1.0.0";
  uint64_t seed = 0;
  SpectrogramGeometry geometry = SpectrogramGeometry::Canonical();
  std::string description;
};

/// Line-delimited JSON: the first line is a header object carrying the
/// metadata, each following line is one entry. Relative paths are resolved
/// against the manifest's directory.
struct CorpusManifest {
  ManifestMetadata metadata;
  std::vector<ManifestEntry> entries;
  std::string root;  // directory used to resolve relative paths

  std::string Resolve(const std::string &path) const;
  /// Structural checks: unique keys, noisy fields present together,
  /// positive durations. With `check_files`, every referenced file must exist.
  void Validate(bool check_files = false) const;
  std::vector<ManifestEntry> Select(Split split, bool include_clean,
                                    bool include_augmented) const;
  std::string Serialize() const;
  std::string Digest() const;
};

CorpusManifest ParseManifest(const std::string &text, const std::string &root);
CorpusManifest ReadManifest(const std::string &path);
void WriteManifest(const std::string &path, const CorpusManifest &manifest);

}  // namespace sise

#endif  // SISE_MANIFEST_H_
