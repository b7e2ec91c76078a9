// sise/figure.h

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

#ifndef SISE_FIGURE_H_
#define SISE_FIGURE_H_

#include <array>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "sise/signal.h"

namespace sise {

struct TrajectorySeries {
  std::string label;
  std::vector<double> values;  // one per 50 Hz frame
};

/// Inputs of the comparison figure: three spectrogram panels (clean, noisy,
/// enhanced) over one track-channel panel. The first series is drawn as
/// the reference.
struct FigureInput {
  std::string utterance_id;
  Waveform clean, noisy, enhanced;
  std::string channel = "TTCD";
  std::vector<TrajectorySeries> series;
  SpectrogramGeometry geometry = SpectrogramGeometry::Canonical();
};

struct FigurePanel {
  std::string kind;   // "spectrogram" or "trajectory"
  std::string title;
  int top = 0, height = 0;
  std::vector<std::string> series;                        // trajectory only
  std::vector<std::array<unsigned char, 3>> colors;       // trajectory only
};

struct FigureLayout {
  int width = 0, height = 0;
  std::vector<FigurePanel> panels;
};

void to_json(nlohmann::json &j, const FigureLayout &l);

/// Writes an RGB PNG and returns its panel layout.
FigureLayout RenderFigure(const FigureInput &input, const std::string &png_path);

/// Minimal PNG writer: rows of packed RGB.
void WritePng(const std::string &path, int width, int height, const std::vector<unsigned char> &rgb);

}  // namespace sise

#endif  // SISE_FIGURE_H_
