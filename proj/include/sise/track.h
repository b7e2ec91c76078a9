// sise/track.h

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

#ifndef SISE_TRACK_H_
#define SISE_TRACK_H_

#include <array>
#include <string>
#include <string_view>

#include "sise/common.h"

namespace sise {

inline constexpr int kNumTrackChannels = 10;
inline constexpr int kNumOralChannels = 6;   // LA .. TTCD
inline constexpr int kNumSourceChannels = 4; // VEL, Per, Aper, F0

/// Fixed channel order of every articulatory track.
inline constexpr std::array<std::string_view, kNumTrackChannels> kTrackChannelNames = {
    "LA", "LP", "TBCL", "TBCD", "TTCL", "TTCD", "VEL", "Per", "Aper", "F0"};

/// Index of a channel name, or -1.
int TrackChannelIndex(std::string_view name);

struct ArticulatoryTrack {
  Matrix channels;  // frames x 10
  int frame_rate = kTrackFrameRate;

  int NumFrames() const { return static_cast<int>(channels.rows()); }
  void Validate() const;
};

/// Track files: ".csv" / ".tsv" are delimited text with a header row naming
/// the ten channels; ".f32" is raw little-endian float32, row-major
/// (frame-major), ten values per frame.
ArticulatoryTrack ReadTrack(const std::string &path);
void WriteTrack(const std::string &path, const ArticulatoryTrack &track);

}  // namespace sise

#endif  // SISE_TRACK_H_
