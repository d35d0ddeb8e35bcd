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

#include "runsem/memory.h"

#include <algorithm>
#include <cassert>
#include <cstring>
#include <limits>

#include "fmt/format.h"

namespace runsem {
namespace {

constexpr uint64_t kOffsetMask = Mem::kPageSize - 1;

uint8_t RequiredBit(Access access) {
  switch (access) {
    case Access::kRead:
      return 1;
    case Access::kWrite:
      return 2;
    case Access::kFetch:
      return 4;
  }
  return 0;
}

// Visits [addr, addr+n) one page-bounded chunk at a time. Addresses wrap mod
// 2^64. The callback returns false to stop early.
template <typename Fn>
void ForEachChunk(uint64_t addr, uint64_t n, Fn&& fn) {
  uint64_t done = 0;
  while (done < n) {
    const uint64_t offset = addr & kOffsetMask;
    const uint64_t chunk =
        std::min<uint64_t>(n - done, Mem::kPageSize - offset);
    if (!fn(addr >> 12, offset, chunk, done)) return;
    addr += chunk;
    done += chunk;
  }
}

const char* AccessName(Access access) {
  switch (access) {
    case Access::kRead:
      return "read";
    case Access::kWrite:
      return "write";
    case Access::kFetch:
      return "fetch";
  }
  return "?";
}

}  // namespace

std::string ToString(Prot prot) {
  std::string s = "---";
  if (prot.read) s[0] = 'r';
  if (prot.write) s[1] = 'w';
  if (prot.exec) s[2] = 'x';
  return s;
}

std::string Describe(const MemFault& fault) {
  if (fault.cause == MemFaultCause::kUnmapped) {
    return fmt::format("{} from unmapped address {:#x}",
                       AccessName(fault.access), fault.addr);
  }
  return fmt::format("{} denied at address {:#x}", AccessName(fault.access),
                     fault.addr);
}

Status<MapError> Mem::MapRegion(uint64_t base, std::span<const uint8_t> data,
                                uint64_t fill_len, Prot prot) {
  const uint64_t len = std::max<uint64_t>(data.size(), fill_len);
  if (len == 0) return {};
  if (base > std::numeric_limits<uint64_t>::max() - (len - 1)) {
    return MapError::kWrapAround;
  }
  const uint8_t attr = kMappedBit | prot.ToBits();
  ForEachChunk(base, len,
               [&](uint64_t page_number, uint64_t offset, uint64_t chunk,
                   uint64_t done) {
                 Page& page = pages_[page_number];
                 std::fill_n(page.attr.begin() + offset, chunk, attr);
                 uint8_t* dst = page.data.data() + offset;
                 uint64_t from_data = 0;
                 if (done < data.size()) {
                   from_data = std::min<uint64_t>(chunk, data.size() - done);
                   std::memcpy(dst, data.data() + done, from_data);
                 }
                 std::memset(dst + from_data, 0, chunk - from_data);
                 return true;
               });
  return {};
}

const Mem::Page* Mem::FindPage(uint64_t page_number) const {
  auto it = pages_.find(page_number);
  return it == pages_.end() ? nullptr : &it->second;
}

std::optional<MemFault> Mem::Check(uint64_t addr, uint64_t n,
                                   Access access) const {
  const uint8_t need = RequiredBit(access);
  std::optional<MemFault> fault;
  ForEachChunk(
      addr, n,
      [&](uint64_t page_number, uint64_t offset, uint64_t chunk, uint64_t) {
        const Page* page = FindPage(page_number);
        const uint64_t page_base = page_number << 12;
        if (page == nullptr) {
          fault =
              MemFault{page_base + offset, access, MemFaultCause::kUnmapped};
          return false;
        }
        for (uint64_t i = offset; i < offset + chunk; ++i) {
          const uint8_t attr = page->attr[i];
          if ((attr & kMappedBit) == 0) {
            fault = MemFault{page_base + i, access, MemFaultCause::kUnmapped};
            return false;
          }
          if ((attr & need) == 0) {
            fault =
                MemFault{page_base + i, access, MemFaultCause::kProtViolation};
            return false;
          }
        }
        return true;
      });
  return fault;
}

Status<MemFault> Mem::ReadInto(uint64_t addr, std::span<uint8_t> out) const {
  if (auto fault = Check(addr, out.size(), Access::kRead)) return *fault;
  ForEachChunk(addr, out.size(),
               [&](uint64_t page_number, uint64_t offset, uint64_t chunk,
                   uint64_t done) {
                 std::memcpy(out.data() + done,
                             FindPage(page_number)->data.data() + offset,
                             chunk);
                 return true;
               });
  return {};
}

Result<std::vector<uint8_t>, MemFault> Mem::ReadBytes(uint64_t addr,
                                                      uint64_t n) const {
  if (auto fault = Check(addr, n, Access::kRead)) return *fault;
  std::vector<uint8_t> out(n);
  ReadInto(addr, out);
  return out;
}

Status<MemFault> Mem::WriteBytes(uint64_t addr, std::span<const uint8_t> data) {
  if (auto fault = Check(addr, data.size(), Access::kWrite)) return *fault;
  ForEachChunk(addr, data.size(),
               [&](uint64_t page_number, uint64_t offset, uint64_t chunk,
                   uint64_t done) {
                 std::memcpy(
                     pages_.find(page_number)->second.data.data() + offset,
                     data.data() + done, chunk);
                 return true;
               });
  return {};
}

Result<std::vector<uint8_t>, MemFault> Mem::FetchBytes(uint64_t addr,
                                                       size_t n) const {
  assert(n <= kMaxFetch);
  FetchWindow window = FetchPrefix(addr, n);
  if (window.fault) return *window.fault;
  return std::move(window.bytes);
}

FetchWindow Mem::FetchPrefix(uint64_t addr, size_t n) const {
  FetchWindow window;
  window.bytes.reserve(n);
  for (size_t i = 0; i < n; ++i) {
    const uint64_t a = addr + i;
    const Page* page = FindPage(a >> 12);
    const uint8_t attr = page ? page->attr[a & kOffsetMask] : 0;
    if ((attr & kMappedBit) == 0) {
      window.fault = MemFault{a, Access::kFetch, MemFaultCause::kUnmapped};
      break;
    }
    if ((attr & RequiredBit(Access::kFetch)) == 0) {
      window.fault = MemFault{a, Access::kFetch, MemFaultCause::kProtViolation};
      break;
    }
    window.bytes.push_back(page->data[a & kOffsetMask]);
  }
  return window;
}

std::optional<Prot> Mem::ProtAt(uint64_t addr) const {
  const Page* page = FindPage(addr >> 12);
  if (page == nullptr) return std::nullopt;
  const uint8_t attr = page->attr[addr & kOffsetMask];
  if ((attr & kMappedBit) == 0) return std::nullopt;
  return Prot::FromBits(attr & 7);
}

bool Mem::AnyMapped(uint64_t base, uint64_t len) const {
  bool any = false;
  ForEachChunk(
      base, len,
      [&](uint64_t page_number, uint64_t offset, uint64_t chunk, uint64_t) {
        const Page* page = FindPage(page_number);
        if (page == nullptr) return true;
        for (uint64_t i = offset; i < offset + chunk; ++i) {
          if (page->attr[i] & kMappedBit) {
            any = true;
            return false;
          }
        }
        return true;
      });
  return any;
}

}  // namespace runsem
