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

#include "runsem/machine.h"

#include <cassert>

namespace runsem {
namespace {

constexpr std::array<std::array<std::string_view, 4>, kNumRegs> kRegNames = {{
    {"al", "ax", "eax", "rax"},
    {"cl", "cx", "ecx", "rcx"},
    {"dl", "dx", "edx", "rdx"},
    {"bl", "bx", "ebx", "rbx"},
    {"spl", "sp", "esp", "rsp"},
    {"bpl", "bp", "ebp", "rbp"},
    {"sil", "si", "esi", "rsi"},
    {"dil", "di", "edi", "rdi"},
    {"r8b", "r8w", "r8d", "r8"},
    {"r9b", "r9w", "r9d", "r9"},
    {"r10b", "r10w", "r10d", "r10"},
    {"r11b", "r11w", "r11d", "r11"},
    {"r12b", "r12w", "r12d", "r12"},
    {"r13b", "r13w", "r13d", "r13"},
    {"r14b", "r14w", "r14d", "r14"},
    {"r15b", "r15w", "r15d", "r15"},
}};

}  // namespace

std::string_view RegName(unsigned reg, WSize sz) {
  assert(reg < kNumRegs);
  return kRegNames[reg][static_cast<size_t>(sz)];
}

uint64_t FlagSet::ToRflags() const {
  return (cf ? uint64_t{1} << 0 : 0) | (zf ? uint64_t{1} << 6 : 0) |
         (sf ? uint64_t{1} << 7 : 0) | (of ? uint64_t{1} << 11 : 0);
}

uint64_t ReadReg(const Config& k, WSize sz, unsigned reg) {
  assert(reg < kNumRegs);
  return k.regs[reg] & Mask(sz);
}

void WriteReg(Config& k, WSize sz, unsigned reg, uint64_t v) {
  assert(reg < kNumRegs);
  assert((v & ~Mask(sz)) == 0);
  uint64_t& r = k.regs[reg];
  switch (sz) {
    case WSize::kSz8:
    case WSize::kSz16:
      r = (r & ~Mask(sz)) | v;
      break;
    case WSize::kSz32:
    case WSize::kSz64:
      r = v;
      break;
  }
}

WideSplit SplitWide(unsigned __int128 res, unsigned bits) {
  assert(bits == 8 || bits == 16 || bits == 32 || bits == 64);
  const unsigned __int128 half_mask =
      (static_cast<unsigned __int128>(1) << bits) - 1;
  assert((res >> bits) <= half_mask);
  return WideSplit{static_cast<uint64_t>(res & half_mask),
                   static_cast<uint64_t>(res >> bits)};
}

}  // namespace runsem
