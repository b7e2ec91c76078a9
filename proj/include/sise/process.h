// sise/process.h

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

#ifndef SISE_PROCESS_H_
#define SISE_PROCESS_H_

#include <map>
#include <string>

namespace sise {

struct CommandResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string out;
  std::string err;
};

/// Runs `command` through /bin/sh, capturing stdout and stderr; kills the
/// child after `timeout_s` seconds.
CommandResult RunCommand(const std::string &command, int timeout_s);

/// Replaces every "{key}" with the shell-quoted value.
std::string FillTemplate(std::string pattern, const std::map<std::string, std::string> &values);

std::string ShellQuote(const std::string &s);

/// Fresh directory under the system temp path.
std::string MakeTempDir(const std::string &prefix);

}  // namespace sise

#endif  // SISE_PROCESS_H_
