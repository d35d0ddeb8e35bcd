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

#ifndef RUNSEM_MACHINE_H_
#define RUNSEM_MACHINE_H_

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "runsem/memory.h"

namespace runsem {

enum class WSize : uint8_t { kSz8, kSz16, kSz32, kSz64 };

constexpr unsigned Bits(WSize sz) {
  switch (sz) {
    case WSize::kSz8:
      return 8;
    case WSize::kSz16:
      return 16;
    case WSize::kSz32:
      return 32;
    case WSize::kSz64:
      return 64;
  }
  return 0;
}

constexpr unsigned Bytes(WSize sz) { return Bits(sz) / 8; }

// All-ones mask of the operand width.
constexpr uint64_t Mask(WSize sz) {
  return sz == WSize::kSz64 ? ~uint64_t{0} : (uint64_t{1} << Bits(sz)) - 1;
}

constexpr uint64_t SignBit(WSize sz) { return uint64_t{1} << (Bits(sz) - 1); }

// Sign-extends the low Bits(sz) bits of v to 64 bits.
constexpr int64_t SignExtend(uint64_t v, WSize sz) {
  const unsigned shift = 64 - Bits(sz);
  return static_cast<int64_t>(v << shift) >> shift;
}

// General purpose register index, in hardware encoding order.
enum Reg : uint8_t {
  kRax = 0,
  kRcx,
  kRdx,
  kRbx,
  kRsp,
  kRbp,
  kRsi,
  kRdi,
  kR8,
  kR9,
  kR10,
  kR11,
  kR12,
  kR13,
  kR14,
  kR15,
};

inline constexpr int kNumRegs = 16;

// Register name at a given width ("eax", "r9w", "sil", ...). Byte registers
// use the REX convention; the legacy ah/ch/dh/bh names are never produced.
std::string_view RegName(unsigned reg, WSize sz);

// The four tracked status flags. Every other RFLAGS bit is outside the model.
struct FlagSet {
  bool cf = false;
  bool zf = false;
  bool sf = false;
  bool of = false;

  // Encodes the tracked flags at their RFLAGS bit positions.
  uint64_t ToRflags() const;

  friend bool operator==(const FlagSet&, const FlagSet&) = default;
};

// Machine configuration: instruction pointer, sixteen registers, flags and
// memory.
struct Config {
  uint64_t rip = 0;
  std::array<uint64_t, kNumRegs> regs{};
  FlagSet flags;
  Mem mem;

  friend bool operator==(const Config&, const Config&) = default;
};

// Low Bits(sz) bits of a register, zero-extended.
uint64_t ReadReg(const Config& k, WSize sz, unsigned reg);

// Sized register write with x86-64 merge rules: 8 and 16 bit writes keep the
// upper bits, 32 bit writes zero the upper half, 64 bit writes replace.
// Requires v to fit in Bits(sz).
void WriteReg(Config& k, WSize sz, unsigned reg, uint64_t v);

struct WideSplit {
  uint64_t lo = 0;
  uint64_t hi = 0;
  friend bool operator==(const WideSplit&, const WideSplit&) = default;
};

// Splits a double-width value into equal halves of `bits` bits:
// lo = res mod 2^bits, hi = res div 2^bits. Requires res < 2^(2*bits) and
// bits in {8, 16, 32, 64}.
WideSplit SplitWide(unsigned __int128 res, unsigned bits);

}  // namespace runsem

#endif  // RUNSEM_MACHINE_H_
