// sise/digest.h

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

#ifndef SISE_DIGEST_H_
#define SISE_DIGEST_H_

#include <span>
#include <string>
#include <string_view>

namespace sise {

/// Incremental SHA-256, hex-encoded on Finish().
class Sha256 {
 public:
  Sha256();
  ~Sha256();
  Sha256(const Sha256 &) = delete;
  Sha256 &operator=(const Sha256 &) = delete;

  void Update(std::string_view bytes);
  void Update(std::span<const double> values);
  std::string Finish();

 private:
  void *ctx_;
};

std::string Sha256Hex(std::string_view bytes);
std::string Sha256File(const std::string &path);

}  // namespace sise

#endif  // SISE_DIGEST_H_
