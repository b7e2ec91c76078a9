// sise/common.h

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

#ifndef SISE_COMMON_H_
#define SISE_COMMON_H_

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace sise {

/// Sample rate of every pipeline-internal waveform.
inline constexpr int kSampleRate = 16000;

/// Frame rate of articulatory tracks and backbone features (20 ms stride).
inline constexpr int kTrackFrameRate = 50;
inline constexpr int kSamplesPerTrackFrame = kSampleRate / kTrackFrameRate;

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using RowVector = Eigen::RowVectorXd;
using Complex = std::complex<double>;
using ComplexMatrix =
    Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class ErrorKind {
  kInvalidInput,
  kInvalidGeometry,
  kDegenerateInput,
  kInsufficientPool,
  kContaminatedEvaluation,
  kCorruptEntry,
  kIncompatibleCheckpoint,
  kInvalidState,
  kScorerError,
  kIoError,
};

std::string_view ErrorKindName(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &message);
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void Fail(ErrorKind kind, const std::string &message);

inline void Require(bool condition, ErrorKind kind, const std::string &message) {
  if (!condition) Fail(kind, message);
}

}  // namespace sise

#endif  // SISE_COMMON_H_
