// src/figure.cc

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

#include "sise/figure.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <memory>

#include <png.h>
#include <nlohmann/json.hpp>

namespace sise {

namespace {

constexpr int kWidth = 800;
constexpr int kMargin = 8;
constexpr int kTrajectoryHeight = 200;

using Rgb = std::array<unsigned char, 3>;

// Piecewise-linear approximation of a perceptual dark-to-bright colormap.
Rgb Colormap(double v) {
  static const std::array<std::array<double, 3>, 5> anchors = {{
      {0.267, 0.005, 0.329}, {0.230, 0.322, 0.546}, {0.128, 0.567, 0.551},
      {0.369, 0.789, 0.383}, {0.993, 0.906, 0.144}}};
  v = std::clamp(v, 0.0, 1.0) * (anchors.size() - 1);
  const size_t i = std::min(static_cast<size_t>(v), anchors.size() - 2);
  const double t = v - i;
  Rgb out;
  for (int c = 0; c < 3; ++c)
    out[c] = static_cast<unsigned char>(
        std::lround(255.0 * ((1 - t) * anchors[i][c] + t * anchors[i + 1][c])));
  return out;
}

const std::vector<Rgb> &SeriesColors() {
  static const std::vector<Rgb> colors = {
      {0, 0, 0}, {214, 39, 40}, {31, 119, 180}, {44, 160, 44}, {148, 103, 189}, {255, 127, 14}};
  return colors;
}

struct Canvas {
  int width, height;
  std::vector<unsigned char> rgb;

  Canvas(int w, int h) : width(w), height(h), rgb(static_cast<size_t>(w) * h * 3, 255) {}
  void Set(int x, int y, const Rgb &c) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    std::copy(c.begin(), c.end(), rgb.begin() + (static_cast<size_t>(y) * width + x) * 3);
  }
  void Line(int x0, int y0, int x1, int y1, const Rgb &c) {
    const int steps = std::max({std::abs(x1 - x0), std::abs(y1 - y0), 1});
    for (int s = 0; s <= steps; ++s)
      Set(x0 + (x1 - x0) * s / steps, y0 + (y1 - y0) * s / steps, c);
  }
};

// Log-magnitude spectrogram in dB, normalized to [0, 1] over an 80 dB range
// anchored at the loudest bin of the clean signal.
void DrawSpectrogram(Canvas &canvas, const Matrix &db, double top_db, int top) {
  const int frames = static_cast<int>(db.rows());
  const int bins = static_cast<int>(db.cols());
  for (int y = 0; y < bins; ++y) {
    const int k = bins - 1 - y;
    for (int x = 0; x < canvas.width; ++x) {
      const int t = std::min(frames - 1, x * frames / canvas.width);
      canvas.Set(x, top + y, Colormap((db(t, k) - (top_db - 80.0)) / 80.0));
    }
  }
}

Matrix DecibelSpectrogram(const Waveform &w, const SpectrogramGeometry &g) {
  return Stft(w, g).Magnitude().unaryExpr(
      [](double m) { return 20.0 * std::log10(std::max(m, 1e-10)); });
}

}  // namespace

void WritePng(const std::string &path, int width, int height, const std::vector<unsigned char> &rgb) {
  Require(rgb.size() == static_cast<size_t>(width) * height * 3, ErrorKind::kInvalidInput,
          "png buffer size does not match its dimensions");
  std::unique_ptr<FILE, int (*)(FILE *)> fp(std::fopen(path.c_str(), "wb"), &std::fclose);
  Require(fp != nullptr, ErrorKind::kIoError, "cannot write " + path);
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  png_infop info = png ? png_create_info_struct(png) : nullptr;
  if (!png || !info || setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    Fail(ErrorKind::kIoError, "libpng failed writing " + path);
  }
  png_init_io(png, fp.get());
  png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  for (int y = 0; y < height; ++y)
    png_write_row(png, const_cast<png_bytep>(rgb.data() + static_cast<size_t>(y) * width * 3));
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

FigureLayout RenderFigure(const FigureInput &input, const std::string &png_path) {
  Require(!input.series.empty(), ErrorKind::kInvalidInput, "figure needs at least one trajectory");
  const Matrix clean = DecibelSpectrogram(input.clean, input.geometry);
  const Matrix noisy = DecibelSpectrogram(input.noisy, input.geometry);
  const Matrix enhanced = DecibelSpectrogram(input.enhanced, input.geometry);
  const int bins = input.geometry.NumBins();

  FigureLayout layout;
  layout.width = kWidth;
  int y = kMargin;
  for (const char *title : {"clean", "noisy", "enhanced"}) {
    layout.panels.push_back({"spectrogram", title, y, bins, {}, {}});
    y += bins + kMargin;
  }
  FigurePanel traj{"trajectory", input.channel, y, kTrajectoryHeight, {}, {}};
  for (size_t i = 0; i < input.series.size(); ++i) {
    traj.series.push_back(input.series[i].label);
    traj.colors.push_back(SeriesColors()[i % SeriesColors().size()]);
  }
  layout.panels.push_back(traj);
  layout.height = y + kTrajectoryHeight + kMargin;

  Canvas canvas(layout.width, layout.height);
  const double top_db = clean.maxCoeff();
  DrawSpectrogram(canvas, clean, top_db, layout.panels[0].top);
  DrawSpectrogram(canvas, noisy, top_db, layout.panels[1].top);
  DrawSpectrogram(canvas, enhanced, top_db, layout.panels[2].top);

  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto &s : input.series)
    for (double v : s.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!(hi > lo)) {
    lo -= 1.0;
    hi += 1.0;
  }
  const Rgb axis = {160, 160, 160};
  canvas.Line(0, traj.top, kWidth - 1, traj.top, axis);
  canvas.Line(0, traj.top + traj.height - 1, kWidth - 1, traj.top + traj.height - 1, axis);
  for (size_t i = 0; i < input.series.size(); ++i) {
    const auto &v = input.series[i].values;
    if (v.size() < 2) continue;
    auto px = [&](size_t f) { return static_cast<int>(f * (kWidth - 1) / (v.size() - 1)); };
    auto py = [&](double val) {
      return traj.top + traj.height - 2 -
             static_cast<int>(std::lround((val - lo) / (hi - lo) * (traj.height - 4)));
    };
    for (size_t f = 1; f < v.size(); ++f)
      canvas.Line(px(f - 1), py(v[f - 1]), px(f), py(v[f]), traj.colors[i]);
  }
  WritePng(png_path, canvas.width, canvas.height, canvas.rgb);
  return layout;
}

void to_json(nlohmann::json &j, const FigureLayout &l) {
  nlohmann::json panels = nlohmann::json::array();
  for (const FigurePanel &p : l.panels) {
    nlohmann::json pj = {{"kind", p.kind}, {"title", p.title}, {"top", p.top}, {"height", p.height}};
    if (p.kind == "trajectory") {
      pj["series"] = p.series;
      pj["colors"] = p.colors;
    }
    panels.push_back(pj);
  }
  j = {{"width", l.width}, {"height", l.height}, {"panels", panels}};
}

}  // namespace sise
