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

#ifndef RUNSEM_MEMORY_H_
#define RUNSEM_MEMORY_H_

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "runsem/result.h"

namespace runsem {

// Read/write/execute permission triple. Packs into three bits with the same
// layout as the Linux PROT_* constants (read=1, write=2, exec=4).
struct Prot {
  bool read = false;
  bool write = false;
  bool exec = false;

  static constexpr Prot FromBits(uint8_t bits) {
    return Prot{(bits & 1) != 0, (bits & 2) != 0, (bits & 4) != 0};
  }
  constexpr uint8_t ToBits() const {
    return static_cast<uint8_t>((read ? 1 : 0) | (write ? 2 : 0) |
                                (exec ? 4 : 0));
  }

  static constexpr Prot R() { return {true, false, false}; }
  static constexpr Prot RW() { return {true, true, false}; }
  static constexpr Prot RX() { return {true, false, true}; }
  static constexpr Prot RWX() { return {true, true, true}; }

  friend constexpr bool operator==(const Prot&, const Prot&) = default;
};

// "r-x" style rendering.
std::string ToString(Prot prot);

enum class Access { kRead, kWrite, kFetch };
enum class MemFaultCause { kUnmapped, kProtViolation };

struct MemFault {
  uint64_t addr = 0;
  Access access = Access::kRead;
  MemFaultCause cause = MemFaultCause::kUnmapped;

  friend bool operator==(const MemFault&, const MemFault&) = default;
};

std::string Describe(const MemFault& fault);

enum class MapError { kWrapAround };

// Result of a best-effort instruction fetch: the longest fetchable prefix,
// plus the fault that stopped it (if it stopped before the requested count).
struct FetchWindow {
  std::vector<uint8_t> bytes;
  std::optional<MemFault> fault;
};

// Sparse, byte-addressable memory. Every mapped byte carries its own Prot;
// storage is grouped into 4 KiB pages but protection is checked per byte.
// Unmapped addresses have no value and every access to them faults.
//
// All mutating operations are all-or-nothing: when they report a fault, the
// memory is left exactly as it was.
class Mem {
 public:
  static constexpr uint64_t kPageSize = 4096;
  static constexpr size_t kMaxFetch = 15;

  // Maps [base, base + max(data.size(), fill_len)), replacing whatever was
  // there. Bytes past the end of `data` are zero.
  Status<MapError> MapRegion(uint64_t base, std::span<const uint8_t> data,
                             uint64_t fill_len, Prot prot);

  Result<std::vector<uint8_t>, MemFault> ReadBytes(uint64_t addr,
                                                   uint64_t n) const;
  // ReadBytes into caller storage; `out` is unspecified on fault.
  Status<MemFault> ReadInto(uint64_t addr, std::span<uint8_t> out) const;
  Status<MemFault> WriteBytes(uint64_t addr, std::span<const uint8_t> data);
  // Requires n <= kMaxFetch and exec permission on every byte.
  Result<std::vector<uint8_t>, MemFault> FetchBytes(uint64_t addr,
                                                    size_t n) const;
  FetchWindow FetchPrefix(uint64_t addr, size_t n) const;

  std::optional<Prot> ProtAt(uint64_t addr) const;
  bool IsMapped(uint64_t addr) const { return ProtAt(addr).has_value(); }
  // True if any byte of [base, base+len) is mapped. Range must not wrap.
  bool AnyMapped(uint64_t base, uint64_t len) const;

  size_t page_count() const { return pages_.size(); }

  friend bool operator==(const Mem&, const Mem&) = default;

 private:
  // attr: 0 = unmapped, otherwise kMappedBit | Prot bits.
  static constexpr uint8_t kMappedBit = 0x8;
  struct Page {
    std::array<uint8_t, kPageSize> data{};
    std::array<uint8_t, kPageSize> attr{};
    friend bool operator==(const Page&, const Page&) = default;
  };

  // Returns the first byte in [addr, addr+n) lacking `need`, or nullopt.
  std::optional<MemFault> Check(uint64_t addr, uint64_t n, Access access) const;
  const Page* FindPage(uint64_t page_number) const;

  std::unordered_map<uint64_t, Page> pages_;
};

}  // namespace runsem

#endif  // RUNSEM_MEMORY_H_
