// sise/checkpoint.h

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

#ifndef SISE_CHECKPOINT_H_
#define SISE_CHECKPOINT_H_

#include <string>

#include <nlohmann/json.hpp>

#include "sise/model.h"

namespace sise {

/// Layout: the line "SISECKPT", one JSON header line (config, config digest,
/// geometry, stage, seed, frozen flag, track normalizer, parameter names and
/// shapes, caller extras), then every parameter as little-endian float64 in
/// header order.
void SaveCheckpoint(const SiseModel &model, const std::string &path,
                    const nlohmann::json &extra = nlohmann::json::object());

/// Reads only the header line.
nlohmann::json ReadCheckpointHeader(const std::string &path);

/// Throws IncompatibleCheckpoint when the stored digest does not match the
/// stored config, when `expected` is given and differs, or when parameter
/// shapes disagree with the rebuilt model.
SiseModel LoadCheckpoint(const std::string &path, const ModelConfig *expected = nullptr,
                         nlohmann::json *extra = nullptr);

}  // namespace sise

#endif  // SISE_CHECKPOINT_H_
