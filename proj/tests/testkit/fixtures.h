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

// Access to the checked-in fixture binaries, their natively recorded
// outputs, and the decoder reference corpus.

#ifndef RUNSEM_TESTS_TESTKIT_FIXTURES_H_
#define RUNSEM_TESTS_TESTKIT_FIXTURES_H_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace testkit {

// "exit:N", "fault:<kind>" or "steplimit" in the manifest.
struct Expectation {
  enum class Kind { kExit, kFault, kStepLimit };
  Kind kind = Kind::kExit;
  int exit_code = 0;
  std::string fault_kind;  // memory, decode, divide, condition, syscall
};

struct Fixture {
  std::string name;
  std::string elf_path;  // absolute
  std::string sha256;
  std::optional<std::string> stdin_path;   // absolute; none means empty
  std::optional<std::string> stdout_path;  // absolute; none for steplimit
  std::string native_status;
  Expectation expected;
  std::vector<std::string> args;  // after argv[0]

  // argv exactly as the native recording saw it: "./<file>" then args.
  std::vector<std::string> NativeArgv() const;
};

std::string FixtureDir();
std::vector<Fixture> LoadManifest();
const Fixture& FixtureByName(const std::vector<Fixture>& all,
                             const std::string& name);

std::vector<uint8_t> ReadFileBytes(const std::string& path);
std::string Sha256Hex(const std::vector<uint8_t>& data);

struct CorpusEntry {
  uint64_t addr;
  std::vector<uint8_t> bytes;
  unsigned length;
  std::string text;
};

std::string CorpusPath();
std::vector<CorpusEntry> LoadDecodeCorpus();

// Absolute path of the built command-line tool.
std::string CliPath();

}  // namespace testkit

#endif  // RUNSEM_TESTS_TESTKIT_FIXTURES_H_
