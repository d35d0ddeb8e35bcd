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

#include "runsem/elf.h"

#include <algorithm>
#include <limits>

namespace runsem {
namespace {

// ELF64 header and program header field offsets.
constexpr size_t kEhdrSize = 0x40;
constexpr size_t kEiClass = 4;
constexpr size_t kEiData = 5;
constexpr size_t kEType = 0x10;
constexpr size_t kEMachine = 0x12;
constexpr size_t kEEntry = 0x18;
constexpr size_t kEPhoff = 0x20;
constexpr size_t kEPhentsize = 0x36;
constexpr size_t kEPhnum = 0x38;

constexpr size_t kPhdrSize = 0x38;
constexpr size_t kPType = 0x00;
constexpr size_t kPFlags = 0x04;
constexpr size_t kPOffset = 0x08;
constexpr size_t kPVaddr = 0x10;
constexpr size_t kPFilesz = 0x20;
constexpr size_t kPMemsz = 0x28;

constexpr uint8_t kElfClass64 = 2;
constexpr uint8_t kElfDataLsb = 1;
constexpr uint16_t kEtExec = 2;
constexpr uint16_t kEmX86_64 = 62;
constexpr uint32_t kPtLoad = 1;
constexpr uint32_t kPfX = 1;
constexpr uint32_t kPfW = 2;
constexpr uint32_t kPfR = 4;

uint64_t Le(std::span<const uint8_t> bytes, size_t off, size_t n) {
  uint64_t v = 0;
  for (size_t i = 0; i < n; ++i) v |= uint64_t{bytes[off + i]} << (8 * i);
  return v;
}

bool Overlaps(uint64_t a, uint64_t a_len, uint64_t b, uint64_t b_len) {
  if (a_len == 0 || b_len == 0) return false;
  return a < b + b_len && b < a + a_len;
}

}  // namespace

std::string_view Describe(ElfError error) {
  switch (error) {
    case ElfError::kBadMagic:
      return "not an ELF file (bad magic)";
    case ElfError::kNot64Bit:
      return "not a 64-bit ELF file";
    case ElfError::kNotLittleEndian:
      return "not a little-endian ELF file";
    case ElfError::kNotExec:
      return "not an executable (ET_EXEC) ELF file";
    case ElfError::kNotX86_64:
      return "not an x86-64 ELF file";
    case ElfError::kTruncated:
      return "truncated ELF file";
    case ElfError::kBadSegment:
      return "malformed PT_LOAD segment";
    case ElfError::kNoLoadSegment:
      return "no PT_LOAD segment";
  }
  return "ELF error";
}

std::string_view Describe(LoadError error) {
  switch (error) {
    case LoadError::kOverlap:
      return "segments overlap each other or the stack";
    case LoadError::kArgumentsTooLarge:
      return "arguments do not fit on the stack";
  }
  return "load error";
}

Result<ElfImage, ElfError> ParseElf(std::span<const uint8_t> bytes) {
  static constexpr uint8_t kMagic[] = {0x7F, 'E', 'L', 'F'};
  for (size_t i = 0; i < 4 && i < bytes.size(); ++i) {
    if (bytes[i] != kMagic[i]) return ElfError::kBadMagic;
  }
  if (bytes.size() < kEhdrSize) return ElfError::kTruncated;
  if (bytes[kEiClass] != kElfClass64) return ElfError::kNot64Bit;
  if (bytes[kEiData] != kElfDataLsb) return ElfError::kNotLittleEndian;
  if (Le(bytes, kEType, 2) != kEtExec) return ElfError::kNotExec;
  if (Le(bytes, kEMachine, 2) != kEmX86_64) return ElfError::kNotX86_64;

  ElfImage img;
  img.entry = Le(bytes, kEEntry, 8);
  const uint64_t phoff = Le(bytes, kEPhoff, 8);
  const uint64_t phentsize = Le(bytes, kEPhentsize, 2);
  const uint64_t phnum = Le(bytes, kEPhnum, 2);
  if (phnum > 0 && phentsize < kPhdrSize) return ElfError::kTruncated;
  if (phoff > bytes.size() || phnum * phentsize > bytes.size() - phoff) {
    return ElfError::kTruncated;
  }

  for (uint64_t i = 0; i < phnum; ++i) {
    const auto ph = bytes.subspan(phoff + i * phentsize, kPhdrSize);
    if (Le(ph, kPType, 4) != kPtLoad) continue;
    const uint64_t flags = Le(ph, kPFlags, 4);
    const uint64_t offset = Le(ph, kPOffset, 8);
    const uint64_t filesz = Le(ph, kPFilesz, 8);
    Segment seg;
    seg.vaddr = Le(ph, kPVaddr, 8);
    seg.mem_size = Le(ph, kPMemsz, 8);
    seg.prot =
        Prot{(flags & kPfR) != 0, (flags & kPfW) != 0, (flags & kPfX) != 0};
    if (offset > bytes.size() || filesz > bytes.size() - offset) {
      return ElfError::kTruncated;
    }
    if (filesz > seg.mem_size ||
        (seg.mem_size > 0 && seg.vaddr > std::numeric_limits<uint64_t>::max() -
                                             (seg.mem_size - 1))) {
      return ElfError::kBadSegment;
    }
    const auto file = bytes.subspan(offset, filesz);
    seg.file_bytes.assign(file.begin(), file.end());
    img.segments.push_back(std::move(seg));
  }
  if (img.segments.empty()) return ElfError::kNoLoadSegment;
  return img;
}

Result<KernelState, LoadError> BuildInitialState(
    const ElfImage& img, const std::vector<std::string>& argv,
    std::span<const uint8_t> stdin_bytes) {
  const auto& segs = img.segments;
  for (size_t i = 0; i < segs.size(); ++i) {
    if (Overlaps(segs[i].vaddr, segs[i].mem_size, kStackBase, kStackSize)) {
      return LoadError::kOverlap;
    }
    for (size_t j = i + 1; j < segs.size(); ++j) {
      if (Overlaps(segs[i].vaddr, segs[i].mem_size, segs[j].vaddr,
                   segs[j].mem_size)) {
        return LoadError::kOverlap;
      }
    }
  }

  // Strings go at the very top; the word-sized frame sits below them,
  // 16-byte aligned.
  uint64_t strings_size = 0;
  for (const auto& arg : argv) strings_size += arg.size() + 1;
  const uint64_t frame_words = 1 + argv.size() + 1 + 1 + 2;
  if (strings_size + frame_words * 8 + 16 > kStackSize) {
    return LoadError::kArgumentsTooLarge;
  }
  const uint64_t strings_base = kStackTop - strings_size;
  const uint64_t rsp = (strings_base - frame_words * 8) & ~uint64_t{15};

  KernelState ks;
  Config& k = ks.config;
  for (const Segment& seg : segs) {
    // The ELF parser guarantees segments do not wrap.
    k.mem.MapRegion(seg.vaddr, seg.file_bytes, seg.mem_size, seg.prot);
  }
  k.mem.MapRegion(kStackBase, {}, kStackSize, Prot::RW());

  std::vector<uint8_t> strings;
  strings.reserve(strings_size);
  std::vector<uint64_t> frame;
  frame.reserve(frame_words);
  frame.push_back(argv.size());
  for (const auto& arg : argv) {
    frame.push_back(strings_base + strings.size());
    strings.insert(strings.end(), arg.begin(), arg.end());
    strings.push_back(0);
  }
  frame.push_back(0);  // argv terminator
  frame.push_back(0);  // empty envp
  frame.push_back(0);  // AT_NULL
  frame.push_back(0);

  std::vector<uint8_t> frame_bytes;
  frame_bytes.reserve(frame.size() * 8);
  for (uint64_t word : frame) {
    for (int i = 0; i < 8; ++i) {
      frame_bytes.push_back(static_cast<uint8_t>(word >> (8 * i)));
    }
  }
  k.mem.WriteBytes(strings_base, strings);
  k.mem.WriteBytes(rsp, frame_bytes);

  k.rip = img.entry;
  k.regs[kRsp] = rsp;
  ks.stdin_data.assign(stdin_bytes.begin(), stdin_bytes.end());
  return ks;
}

}  // namespace runsem
