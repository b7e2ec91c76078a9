// src/checkpoint.cc

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

#include "sise/checkpoint.h"

#include <filesystem>
#include <fstream>

#include "sise/digest.h"

namespace sise {

namespace {

constexpr char kMagic[] = "SISECKPT";

}  // namespace

void SaveCheckpoint(const SiseModel &model, const std::string &path, const nlohmann::json &extra) {
  const auto params = model.AllParameters();
  nlohmann::json shapes = nlohmann::json::array();
  for (const Parameter *p : params)
    shapes.push_back({{"name", p->name}, {"rows", p->value.rows()}, {"cols", p->value.cols()}});
  const nlohmann::json header = {
      {"config", model.config()},
      {"config_digest", model.config().Digest()},
      {"geometry", model.config().geometry},
      {"stage", model.stage()},
      {"seed", model.config().seed},
      {"backbone_frozen", model.backbone_frozen()},
      {"normalizer", model.normalizer()},
      {"parameters", shapes},
      {"extra", extra}};

  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    Require(static_cast<bool>(out), ErrorKind::kIoError, "cannot write checkpoint " + path);
    out << kMagic << '\n' << header.dump() << '\n';
    for (const Parameter *p : params)
      out.write(reinterpret_cast<const char *>(p->value.data()),
                static_cast<std::streamsize>(p->value.size() * sizeof(double)));
    Require(static_cast<bool>(out), ErrorKind::kIoError, "failed writing checkpoint " + path);
  }
  std::filesystem::rename(tmp, path);
}

namespace {

nlohmann::json ReadHeader(std::ifstream &in, const std::string &path) {
  std::string magic, line;
  std::getline(in, magic);
  Require(static_cast<bool>(in) && magic == kMagic, ErrorKind::kIncompatibleCheckpoint,
          path + " is not a checkpoint file");
  std::getline(in, line);
  try {
    return nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorKind::kIncompatibleCheckpoint, path + ": unreadable header: " + e.what());
  }
}

}  // namespace

nlohmann::json ReadCheckpointHeader(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  Require(static_cast<bool>(in), ErrorKind::kIoError, "cannot open checkpoint " + path);
  return ReadHeader(in, path);
}

SiseModel LoadCheckpoint(const std::string &path, const ModelConfig *expected,
                         nlohmann::json *extra) {
  std::ifstream in(path, std::ios::binary);
  Require(static_cast<bool>(in), ErrorKind::kIoError, "cannot open checkpoint " + path);
  const nlohmann::json header = ReadHeader(in, path);

  ModelConfig config;
  std::string digest;
  try {
    config = header.at("config").get<ModelConfig>();
    digest = header.at("config_digest").get<std::string>();
  } catch (const nlohmann::json::exception &e) {
    Fail(ErrorKind::kIncompatibleCheckpoint, path + ": malformed header: " + e.what());
  }
  Require(config.Digest() == digest, ErrorKind::kIncompatibleCheckpoint,
          path + ": config digest does not match the stored config");
  if (expected && expected->Digest() != digest) {
    std::string what = "config differs";
    if (!(expected->geometry == config.geometry)) what = "spectrogram geometry differs";
    else if (expected->backbone != config.backbone) what = "backbone differs";
    Fail(ErrorKind::kIncompatibleCheckpoint, path + ": " + what + " from the requested model");
  }

  SiseModel model(config);
  const auto params = model.AllParameters();
  const nlohmann::json &shapes = header.at("parameters");
  Require(shapes.size() == params.size(), ErrorKind::kIncompatibleCheckpoint,
          path + ": parameter count mismatch");
  for (size_t i = 0; i < params.size(); ++i) {
    Parameter *p = params[i];
    const nlohmann::json &s = shapes[i];
    Require(s.at("name") == p->name && s.at("rows") == p->value.rows() &&
                s.at("cols") == p->value.cols(),
            ErrorKind::kIncompatibleCheckpoint, path + ": parameter " + p->name + " mismatch");
    in.read(reinterpret_cast<char *>(p->value.data()),
            static_cast<std::streamsize>(p->value.size() * sizeof(double)));
    Require(static_cast<bool>(in), ErrorKind::kIncompatibleCheckpoint, path + ": truncated");
  }
  model.set_stage(header.value("stage", 1));
  model.set_backbone_frozen(header.value("backbone_frozen", true));
  if (header.contains("normalizer")) model.set_normalizer(header.at("normalizer").get<TrackNormalizer>());
  if (extra) *extra = header.value("extra", nlohmann::json::object());
  return model;
}

}  // namespace sise
