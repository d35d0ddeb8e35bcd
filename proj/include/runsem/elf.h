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

#ifndef RUNSEM_ELF_H_
#define RUNSEM_ELF_H_

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "runsem/kernel.h"
#include "runsem/memory.h"
#include "runsem/result.h"

namespace runsem {

struct Segment {
  uint64_t vaddr = 0;
  std::vector<uint8_t> file_bytes;
  uint64_t mem_size = 0;  // >= file_bytes.size()
  Prot prot;
  friend bool operator==(const Segment&, const Segment&) = default;
};

// A static ELF64 executable reduced to what loading needs: the entry point
// and its PT_LOAD segments. Section headers are never looked at.
struct ElfImage {
  uint64_t entry = 0;
  std::vector<Segment> segments;
  friend bool operator==(const ElfImage&, const ElfImage&) = default;
};

enum class ElfError : uint8_t {
  kBadMagic,
  kNot64Bit,
  kNotLittleEndian,
  kNotExec,
  kNotX86_64,
  kTruncated,
  kBadSegment,  // p_filesz > p_memsz or the segment wraps the address space
  kNoLoadSegment,
};

std::string_view Describe(ElfError error);

Result<ElfImage, ElfError> ParseElf(std::span<const uint8_t> bytes);

// Fixed 64 KiB stack ending just below the canonical user-space top.
inline constexpr uint64_t kStackTop = 0x0000'7FFF'FFFF'F000;
inline constexpr uint64_t kStackSize = 64 * 1024;
inline constexpr uint64_t kStackBase = kStackTop - kStackSize;

enum class LoadError : uint8_t {
  kOverlap,            // two segments, or a segment and the stack, overlap
  kArgumentsTooLarge,  // the entry frame does not fit in the stack
};

std::string_view Describe(LoadError error);

// Maps the segments and a stack holding the System V entry frame
// (argc, argv[], NULL, envp NULL, AT_NULL auxv). RSP points at argc, RIP at
// the entry point; every other register and flag is zero.
Result<KernelState, LoadError> BuildInitialState(
    const ElfImage& img, const std::vector<std::string>& argv,
    std::span<const uint8_t> stdin_bytes);

}  // namespace runsem

#endif  // RUNSEM_ELF_H_
