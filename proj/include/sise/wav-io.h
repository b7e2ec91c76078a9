// sise/wav-io.h

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

#ifndef SISE_WAV_IO_H_
#define SISE_WAV_IO_H_

#include <string>

#include "sise/signal.h"

namespace sise {

enum class WavSampleFormat { kPcm16, kFloat32 };

/// Reads a mono RIFF/WAVE file (16-bit PCM or 32-bit IEEE float).
/// Multi-channel files are rejected with InvalidInput.
Waveform ReadWav(const std::string &path);

/// Writes a mono RIFF/WAVE file. PCM16 output is clipped to [-1, 1).
void WriteWav(const std::string &path, const Waveform &wave,
              WavSampleFormat format = WavSampleFormat::kFloat32);

/// Reads a WAV file and normalizes it to 16 kHz.
Waveform ReadWavAt16k(const std::string &path);

}  // namespace sise

#endif  // SISE_WAV_IO_H_
