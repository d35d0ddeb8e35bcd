// Copyright 2026 The runsem Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef RUNSEM_CLI_H_
#define RUNSEM_CLI_H_

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace runsem {

inline constexpr int kExitStepLimit = 124;
inline constexpr int kExitFaulted = 125;
inline constexpr int kExitBadElf = 126;

struct RunOptions {
  std::string binary_path;
  // Guest arguments after argv[0]; argv[0] is always binary_path.
  std::vector<std::string> args;
  // At most one of these is set; neither means empty stdin. A path of "-"
  // reads the host's stdin.
  std::optional<std::string> stdin_path;
  std::optional<std::string> stdin_bytes;
  uint64_t max_steps = 100'000'000;
  bool trace = false;
  std::optional<std::string> trace_path;  // host stderr when unset
};

// Loads and runs the binary. Guest output goes to `guest_out` as it is
// produced; diagnostics and (absent a trace path) the trace go to `diag`.
// Returns the process exit code: the guest's own code on exit, or
// kExitStepLimit / kExitFaulted / kExitBadElf.
int RunMain(const RunOptions& options, std::ostream& guest_out,
            std::ostream& diag);

}  // namespace runsem

#endif  // RUNSEM_CLI_H_
