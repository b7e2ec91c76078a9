// src/common.cc

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

#include "sise/common.h"

namespace sise {

std::string_view ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidInput: return "InvalidInput";
    case ErrorKind::kInvalidGeometry: return "InvalidGeometry";
    case ErrorKind::kDegenerateInput: return "DegenerateInput";
    case ErrorKind::kInsufficientPool: return "InsufficientPool";
    case ErrorKind::kContaminatedEvaluation: return "ContaminatedEvaluation";
    case ErrorKind::kCorruptEntry: return "CorruptEntry";
    case ErrorKind::kIncompatibleCheckpoint: return "IncompatibleCheckpoint";
    case ErrorKind::kInvalidState: return "InvalidState";
    case ErrorKind::kScorerError: return "ScorerError";
    case ErrorKind::kIoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string &message)
    : std::runtime_error(std::string(ErrorKindName(kind)) + ": " + message),
      kind_(kind) {}

void Fail(ErrorKind kind, const std::string &message) {
  throw Error(kind, message);
}

}  // namespace sise
