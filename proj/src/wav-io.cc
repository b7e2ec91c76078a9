// src/wav-io.cc

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

#include "sise/wav-io.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <vector>

namespace sise {

namespace {

uint32_t ReadU32(const unsigned char *p) {
  return p[0] | (p[1] << 8) | (p[2] << 16) | (static_cast<uint32_t>(p[3]) << 24);
}
uint16_t ReadU16(const unsigned char *p) { return static_cast<uint16_t>(p[0] | (p[1] << 8)); }

void PutU32(std::string &s, uint32_t v) {
  for (int i = 0; i < 4; ++i) s.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}
void PutU16(std::string &s, uint16_t v) {
  s.push_back(static_cast<char>(v & 0xff));
  s.push_back(static_cast<char>(v >> 8));
}

}  // namespace

Waveform ReadWav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  Require(static_cast<bool>(in), ErrorKind::kIoError, "cannot open wav file " + path);
  std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  Require(data.size() >= 12 && std::memcmp(data.data(), "RIFF", 4) == 0 &&
              std::memcmp(data.data() + 8, "WAVE", 4) == 0,
          ErrorKind::kInvalidInput, path + " is not a RIFF/WAVE file");

  uint16_t format = 0, channels = 0, bits = 0;
  uint32_t rate = 0;
  const unsigned char *payload = nullptr;
  size_t payload_size = 0;
  size_t pos = 12;
  while (pos + 8 <= data.size()) {
    const unsigned char *chunk = data.data() + pos;
    const uint32_t size = ReadU32(chunk + 4);
    const size_t body = pos + 8;
    const size_t avail = std::min<size_t>(size, data.size() - body);
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      Require(avail >= 16, ErrorKind::kInvalidInput, "truncated fmt chunk in " + path);
      format = ReadU16(chunk + 8);
      channels = ReadU16(chunk + 10);
      rate = ReadU32(chunk + 12);
      bits = ReadU16(chunk + 22);
      if (format == 0xFFFE && avail >= 26) format = ReadU16(chunk + 8 + 24);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      payload = chunk + 8;
      payload_size = avail;
    }
    pos = body + size + (size & 1);
  }
  Require(format != 0 && payload != nullptr, ErrorKind::kInvalidInput,
          path + " lacks a fmt or data chunk");
  Require(channels == 1, ErrorKind::kInvalidInput,
          path + " has " + std::to_string(channels) + " channels; only mono is supported");

  std::vector<double> samples;
  if (format == 1 && bits == 16) {
    samples.resize(payload_size / 2);
    for (size_t i = 0; i < samples.size(); ++i)
      samples[i] = static_cast<int16_t>(ReadU16(payload + 2 * i)) / 32768.0;
  } else if (format == 3 && bits == 32) {
    samples.resize(payload_size / 4);
    for (size_t i = 0; i < samples.size(); ++i) {
      const uint32_t u = ReadU32(payload + 4 * i);
      float f;
      std::memcpy(&f, &u, 4);
      samples[i] = f;
    }
  } else {
    Fail(ErrorKind::kInvalidInput,
         path + ": unsupported sample format (need 16-bit PCM or 32-bit float)");
  }
  Waveform w(std::move(samples), static_cast<int>(rate));
  w.Validate();
  return w;
}

void WriteWav(const std::string &path, const Waveform &wave, WavSampleFormat format) {
  const bool is_float = format == WavSampleFormat::kFloat32;
  const uint16_t bytes = is_float ? 4 : 2;
  const uint32_t data_size = static_cast<uint32_t>(wave.size() * bytes);
  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  PutU32(out, 36 + data_size);
  out += "WAVEfmt ";
  PutU32(out, 16);
  PutU16(out, is_float ? 3 : 1);
  PutU16(out, 1);
  PutU32(out, static_cast<uint32_t>(wave.sample_rate));
  PutU32(out, static_cast<uint32_t>(wave.sample_rate) * bytes);
  PutU16(out, bytes);
  PutU16(out, static_cast<uint16_t>(8 * bytes));
  out += "data";
  PutU32(out, data_size);
  for (double v : wave.samples) {
    if (is_float) {
      const float f = static_cast<float>(v);
      uint32_t u;
      std::memcpy(&u, &f, 4);
      PutU32(out, u);
    } else {
      const double c = std::clamp(v, -1.0, 32767.0 / 32768.0);
      PutU16(out, static_cast<uint16_t>(static_cast<int16_t>(std::lround(c * 32768.0))));
    }
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  Require(static_cast<bool>(f), ErrorKind::kIoError, "cannot write " + path);
  f.write(out.data(), static_cast<std::streamsize>(out.size()));
  Require(static_cast<bool>(f), ErrorKind::kIoError, "short write to " + path);
}

Waveform ReadWavAt16k(const std::string &path) {
  return Resample(ReadWav(path), kSampleRate);
}

}  // namespace sise
