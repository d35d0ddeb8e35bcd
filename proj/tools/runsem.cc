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

// runsem: runs a static x86-64 Linux executable on the reference semantics.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "runsem/cli.h"

int main(int argc, char** argv) {
  runsem::RunOptions options;
  std::string trace_path;
  std::string stdin_path;
  std::string stdin_bytes;

  CLI::App app{
      "Run a static x86-64 ELF executable as a function on byte streams"};
  app.add_option("binary", options.binary_path, "ELF executable to run")
      ->required();
  app.add_option("--max-steps", options.max_steps,
                 "Stop after this many instructions (exit code 124)")
      ->check(CLI::PositiveNumber);
  auto* trace =
      app.add_option("--trace", trace_path,
                     "Write a per-step trace to PATH (default: stderr)")
          ->expected(0, 1);
  auto* stdin_file = app.add_option("--stdin", stdin_path,
                                    "Guest stdin from file ('-' = host stdin)");
  auto* stdin_inline =
      app.add_option("--stdin-bytes", stdin_bytes, "Guest stdin given inline");
  stdin_file->excludes(stdin_inline);
  app.add_option("--arg", options.args, "Guest argument (repeatable)")
      ->allow_extra_args(false);

  CLI11_PARSE(app, argc, argv);

  if (trace->count() > 0) {
    options.trace = true;
    if (!trace_path.empty()) options.trace_path = trace_path;
  }
  if (stdin_file->count() > 0) options.stdin_path = stdin_path;
  if (stdin_inline->count() > 0) options.stdin_bytes = stdin_bytes;

  std::ios::sync_with_stdio(false);
  return runsem::RunMain(options, std::cout, std::cerr);
}
