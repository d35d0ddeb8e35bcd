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

#include "fixtures.h"

#include <openssl/evp.h>

#include <fstream>
#include <iterator>
#include <sstream>
#include <stdexcept>

namespace testkit {
namespace {

std::vector<std::string> SplitTabs(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, '\t')) out.push_back(field);
  return out;
}

Expectation ParseExpectation(const std::string& s) {
  Expectation e;
  if (s == "steplimit") {
    e.kind = Expectation::Kind::kStepLimit;
  } else if (s.rfind("exit:", 0) == 0) {
    e.kind = Expectation::Kind::kExit;
    e.exit_code = std::stoi(s.substr(5));
  } else if (s.rfind("fault:", 0) == 0) {
    e.kind = Expectation::Kind::kFault;
    e.fault_kind = s.substr(6);
  } else {
    throw std::runtime_error("bad manifest expectation: " + s);
  }
  return e;
}

}  // namespace

std::vector<std::string> Fixture::NativeArgv() const {
  std::vector<std::string> argv{
      "./" + elf_path.substr(elf_path.find_last_of('/') + 1)};
  argv.insert(argv.end(), args.begin(), args.end());
  return argv;
}

std::string FixtureDir() { return RUNSEM_FIXTURE_DIR; }
std::string CorpusPath() { return RUNSEM_DECODE_CORPUS; }
std::string CliPath() { return RUNSEM_CLI_PATH; }

std::vector<Fixture> LoadManifest() {
  const std::string dir = FixtureDir();
  std::ifstream in(dir + "/MANIFEST");
  if (!in) throw std::runtime_error("missing " + dir + "/MANIFEST");
  std::vector<Fixture> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto f = SplitTabs(line);
    if (f.size() < 7) throw std::runtime_error("short manifest line: " + line);
    Fixture fx;
    fx.name = f[0];
    fx.elf_path = dir + "/" + f[1];
    fx.sha256 = f[2];
    if (f[3] != "-") fx.stdin_path = dir + "/" + f[3];
    if (f[4] != "-") fx.stdout_path = dir + "/" + f[4];
    fx.native_status = f[5];
    fx.expected = ParseExpectation(f[6]);
    fx.args.assign(f.begin() + 7, f.end());
    out.push_back(std::move(fx));
  }
  return out;
}

const Fixture& FixtureByName(const std::vector<Fixture>& all,
                             const std::string& name) {
  for (const auto& f : all) {
    if (f.name == name) return f;
  }
  throw std::runtime_error("no fixture named " + name);
}

std::vector<uint8_t> ReadFileBytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::string Sha256Hex(const std::vector<uint8_t>& data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(), nullptr);
  static const char* kHex = "0123456789abcdef";
  std::string out;
  for (unsigned i = 0; i < len; ++i) {
    out += kHex[digest[i] >> 4];
    out += kHex[digest[i] & 15];
  }
  return out;
}

std::vector<CorpusEntry> LoadDecodeCorpus() {
  std::ifstream in(CorpusPath());
  if (!in) throw std::runtime_error("missing " + CorpusPath());
  std::vector<CorpusEntry> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    auto f = SplitTabs(line);
    if (f.size() != 4) throw std::runtime_error("bad corpus line: " + line);
    CorpusEntry e;
    e.addr = std::stoull(f[0], nullptr, 16);
    std::istringstream hex(f[1]);
    std::string byte;
    while (hex >> byte) {
      e.bytes.push_back(static_cast<uint8_t>(std::stoul(byte, nullptr, 16)));
    }
    e.length = static_cast<unsigned>(std::stoul(f[2]));
    e.text = f[3];
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace testkit
