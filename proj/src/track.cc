// src/track.cc

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

#include "sise/track.h"

#include <cmath>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace sise {

namespace {

enum class TrackFormat { kCsv, kTsv, kF32 };

TrackFormat FormatFromPath(const std::string &path) {
  auto ends_with = [&](std::string_view s) {
    return path.size() >= s.size() && path.compare(path.size() - s.size(), s.size(), s) == 0;
  };
  if (ends_with(".csv")) return TrackFormat::kCsv;
  if (ends_with(".tsv")) return TrackFormat::kTsv;
  if (ends_with(".f32")) return TrackFormat::kF32;
  Fail(ErrorKind::kInvalidInput, "unknown track extension for " + path +
                                     " (expected .csv, .tsv or .f32)");
}

std::vector<std::string> Split(const std::string &line, char delim) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, delim)) out.push_back(item);
  return out;
}

}  // namespace

int TrackChannelIndex(std::string_view name) {
  for (int i = 0; i < kNumTrackChannels; ++i)
    if (kTrackChannelNames[i] == name) return i;
  return -1;
}

void ArticulatoryTrack::Validate() const {
  Require(channels.cols() == kNumTrackChannels, ErrorKind::kInvalidInput,
          "articulatory track must have 10 channels");
  Require(channels.allFinite(), ErrorKind::kInvalidInput, "track has non-finite values");
}

ArticulatoryTrack ReadTrack(const std::string &path) {
  const TrackFormat format = FormatFromPath(path);
  ArticulatoryTrack track;
  if (format == TrackFormat::kF32) {
    std::ifstream in(path, std::ios::binary);
    Require(static_cast<bool>(in), ErrorKind::kIoError, "cannot open " + path);
    std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    Require(bytes.size() % (4 * kNumTrackChannels) == 0, ErrorKind::kCorruptEntry,
            path + ": size is not a multiple of 10 float32 values");
    const long frames = static_cast<long>(bytes.size() / (4 * kNumTrackChannels));
    track.channels.resize(frames, kNumTrackChannels);
    for (long i = 0; i < frames * kNumTrackChannels; ++i) {
      float f;
      std::memcpy(&f, bytes.data() + 4 * i, 4);
      track.channels.data()[i] = f;
    }
  } else {
    const char delim = format == TrackFormat::kCsv ? ',' : '\t';
    std::ifstream in(path);
    Require(static_cast<bool>(in), ErrorKind::kIoError, "cannot open " + path);
    std::string line;
    Require(static_cast<bool>(std::getline(in, line)), ErrorKind::kCorruptEntry,
            path + ": missing header row");
    const std::vector<std::string> header = Split(line, delim);
    Require(header.size() == kNumTrackChannels, ErrorKind::kCorruptEntry,
            path + ": header must name 10 channels");
    std::array<int, kNumTrackChannels> column_of{};
    for (int c = 0; c < kNumTrackChannels; ++c) {
      const int idx = TrackChannelIndex(header[c]);
      Require(idx >= 0, ErrorKind::kCorruptEntry, path + ": unknown channel " + header[c]);
      column_of[c] = idx;
    }
    std::vector<double> values;
    long frames = 0;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const std::vector<std::string> cells = Split(line, delim);
      Require(cells.size() == kNumTrackChannels, ErrorKind::kCorruptEntry,
              path + ": row " + std::to_string(frames + 1) + " does not have 10 values");
      std::array<double, kNumTrackChannels> row{};
      for (int c = 0; c < kNumTrackChannels; ++c) row[column_of[c]] = std::stod(cells[c]);
      values.insert(values.end(), row.begin(), row.end());
      ++frames;
    }
    track.channels = Eigen::Map<Matrix>(values.data(), frames, kNumTrackChannels);
  }
  track.Validate();
  return track;
}

void WriteTrack(const std::string &path, const ArticulatoryTrack &track) {
  track.Validate();
  const TrackFormat format = FormatFromPath(path);
  if (format == TrackFormat::kF32) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    Require(static_cast<bool>(out), ErrorKind::kIoError, "cannot write " + path);
    for (long i = 0; i < track.channels.size(); ++i) {
      const float f = static_cast<float>(track.channels.data()[i]);
      out.write(reinterpret_cast<const char *>(&f), 4);
    }
    return;
  }
  const char delim = format == TrackFormat::kCsv ? ',' : '\t';
  std::ofstream out(path, std::ios::trunc);
  Require(static_cast<bool>(out), ErrorKind::kIoError, "cannot write " + path);
  for (int c = 0; c < kNumTrackChannels; ++c)
    out << (c ? std::string(1, delim) : std::string()) << kTrackChannelNames[c];
  out << '\n' << std::setprecision(9);
  for (int t = 0; t < track.NumFrames(); ++t) {
    for (int c = 0; c < kNumTrackChannels; ++c)
      out << (c ? std::string(1, delim) : std::string()) << track.channels(t, c);
    out << '\n';
  }
}

}  // namespace sise
