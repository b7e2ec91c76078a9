// src/manifest.cc

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

#include "sise/manifest.h"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sise/digest.h"

namespace sise {

namespace fs = std::filesystem;
using nlohmann::json;

std::string SplitName(Split s) {
  switch (s) {
    case Split::kTrain: return "train";
    case Split::kDev: return "dev";
    case Split::kTest: return "test";
  }
  return "train";
}

Split ParseSplit(const std::string &s) {
  if (s == "train") return Split::kTrain;
  if (s == "dev") return Split::kDev;
  if (s == "test") return Split::kTest;
  Fail(ErrorKind::kCorruptEntry, "unknown split '" + s + "'");
}

std::string NoiseKindName(NoiseKind k) {
  switch (k) {
    case NoiseKind::kBabble: return "babble";
    case NoiseKind::kNonBabble: return "nonbabble";
    case NoiseKind::kCombined: return "combined";
  }
  return "babble";
}

NoiseKind ParseNoiseKind(const std::string &s) {
  if (s == "babble") return NoiseKind::kBabble;
  if (s == "nonbabble") return NoiseKind::kNonBabble;
  if (s == "combined") return NoiseKind::kCombined;
  Fail(ErrorKind::kCorruptEntry, "unknown noise kind '" + s + "'");
}

std::string ManifestEntry::Key() const {
  std::ostringstream os;
  os << utterance_id << '|' << (noise_kind ? NoiseKindName(*noise_kind) : "clean") << '|';
  if (snr_db) os << *snr_db;
  return os.str();
}

std::string CorpusManifest::Resolve(const std::string &path) const {
  if (path.empty() || fs::path(path).is_absolute() || root.empty()) return path;
  return (fs::path(root) / path).string();
}

void CorpusManifest::Validate(bool check_files) const {
  std::set<std::string> keys;
  for (const ManifestEntry &e : entries) {
    const std::string where = "manifest entry '" + e.utterance_id + "'";
    Require(!e.utterance_id.empty(), ErrorKind::kCorruptEntry, "entry without utterance_id");
    Require(keys.insert(e.Key()).second, ErrorKind::kCorruptEntry,
            "duplicate (id, noise_kind, snr) key " + e.Key());
    const bool all = e.noisy_path && e.noise_kind && e.snr_db;
    const bool none = !e.noisy_path && !e.noise_kind && !e.snr_db;
    Require(all || none, ErrorKind::kCorruptEntry,
            where + ": noisy_path, noise_kind and snr_db must be present together");
    Require(e.duration_s > 0.0, ErrorKind::kCorruptEntry, where + ": duration must be > 0");
    if (check_files) {
      for (const std::string *p : {&e.clean_path, &e.track_path})
        Require(fs::exists(Resolve(*p)), ErrorKind::kCorruptEntry,
                where + ": missing file " + Resolve(*p));
      if (e.noisy_path)
        Require(fs::exists(Resolve(*e.noisy_path)), ErrorKind::kCorruptEntry,
                where + ": missing file " + Resolve(*e.noisy_path));
    }
  }
}

std::vector<ManifestEntry> CorpusManifest::Select(Split split, bool include_clean,
                                                  bool include_augmented) const {
  std::vector<ManifestEntry> out;
  for (const ManifestEntry &e : entries) {
    if (e.split != split) continue;
    if (e.IsAugmented() ? include_augmented : include_clean) out.push_back(e);
  }
  return out;
}

namespace {

json EntryToJson(const ManifestEntry &e) {
  json j;
  j["utterance_id"] = e.utterance_id;
  j["split"] = SplitName(e.split);
  j["clean_path"] = e.clean_path;
  j["noisy_path"] = e.noisy_path ? json(*e.noisy_path) : json(nullptr);
  j["noise_kind"] = e.noise_kind ? json(NoiseKindName(*e.noise_kind)) : json(nullptr);
  j["snr_db"] = e.snr_db ? json(*e.snr_db) : json(nullptr);
  j["mix_gain"] = e.mix_gain;
  j["track_path"] = e.track_path;
  j["duration_s"] = e.duration_s;
  return j;
}

ManifestEntry EntryFromJson(const json &j) {
  ManifestEntry e;
  e.utterance_id = j.at("utterance_id").get<std::string>();
  e.split = ParseSplit(j.at("split").get<std::string>());
  e.clean_path = j.at("clean_path").get<std::string>();
  if (j.contains("noisy_path") && !j["noisy_path"].is_null())
    e.noisy_path = j["noisy_path"].get<std::string>();
  if (j.contains("noise_kind") && !j["noise_kind"].is_null())
    e.noise_kind = ParseNoiseKind(j["noise_kind"].get<std::string>());
  if (j.contains("snr_db") && !j["snr_db"].is_null()) e.snr_db = j["snr_db"].get<double>();
  e.mix_gain = j.value("mix_gain", 1.0);
  e.track_path = j.at("track_path").get<std::string>();
  e.duration_s = j.at("duration_s").get<double>();
  return e;
}

}  // namespace

std::string CorpusManifest::Serialize() const {
  std::ostringstream os;
  json header;
  header["manifest"] = "sise-corpus";
  header["toolkit_version"] = metadata.toolkit_version;
  header["seed"] = metadata.seed;
  header["geometry"] = metadata.geometry;
  header["description"] = metadata.description;
  os << header.dump() << '\n';
  for (const ManifestEntry &e : entries) os << EntryToJson(e).dump() << '\n';
  return os.str();
}

std::string CorpusManifest::Digest() const { return Sha256Hex(Serialize()); }

CorpusManifest ParseManifest(const std::string &text, const std::string &root) {
  CorpusManifest m;
  m.root = root;
  std::istringstream in(text);
  std::string line;
  bool have_header = false;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception &ex) {
      Fail(ErrorKind::kCorruptEntry, "manifest line " + std::to_string(line_no) + ": " + ex.what());
    }
    if (!have_header) {
      Require(j.value("manifest", std::string()) == "sise-corpus", ErrorKind::kCorruptEntry,
              "manifest header missing");
      m.metadata.toolkit_version = j.value("toolkit_version", std::string());
      m.metadata.seed = j.value("seed", uint64_t{0});
      if (j.contains("geometry")) m.metadata.geometry = j["geometry"].get<SpectrogramGeometry>();
      m.metadata.description = j.value("description", std::string());
      have_header = true;
      continue;
    }
    try {
      m.entries.push_back(EntryFromJson(j));
    } catch (const json::exception &ex) {
      Fail(ErrorKind::kCorruptEntry, "manifest line " + std::to_string(line_no) + ": " + ex.what());
    }
  }
  Require(have_header, ErrorKind::kCorruptEntry, "empty manifest");
  return m;
}

CorpusManifest ReadManifest(const std::string &path) {
  std::ifstream in(path);
  Require(static_cast<bool>(in), ErrorKind::kIoError, "cannot open manifest " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ParseManifest(ss.str(), fs::path(path).parent_path().string());
}

void WriteManifest(const std::string &path, const CorpusManifest &manifest) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::trunc);
  Require(static_cast<bool>(out), ErrorKind::kIoError, "cannot write manifest " + path);
  // Relative paths are stored against the directory holding the file.
  const fs::path dir = fs::absolute(p).parent_path();
  CorpusManifest rebased = manifest;
  auto rebase = [&](std::string &field) {
    if (field.empty() || fs::path(field).is_absolute()) return;
    field = fs::proximate(fs::absolute(manifest.Resolve(field)), dir).string();
  };
  for (ManifestEntry &e : rebased.entries) {
    rebase(e.clean_path);
    rebase(e.track_path);
    if (e.noisy_path) rebase(*e.noisy_path);
  }
  out << rebased.Serialize();
}

}  // namespace sise
