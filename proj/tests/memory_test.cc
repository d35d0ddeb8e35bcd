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

#include <gtest/gtest.h>

#include <random>
#include <vector>

namespace runsem {
namespace {

std::vector<uint8_t> V(std::initializer_list<uint8_t> b) { return b; }

TEST(ProtTest, BitsRoundTrip) {
  for (uint8_t bits = 0; bits < 8; ++bits) {
    EXPECT_EQ(Prot::FromBits(bits).ToBits(), bits);
  }
  EXPECT_EQ(ToString(Prot::RX()), "r-x");
  EXPECT_EQ(ToString(Prot{}), "---");
}

TEST(MemTest, MapThenRead) {
  Mem m;
  ASSERT_TRUE(m.MapRegion(0x1000, V({1, 2, 3, 4}), 0, Prot::RWX()).ok());
  auto r = m.ReadBytes(0x1000, 4);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(*r, V({1, 2, 3, 4}));
}

TEST(MemTest, ZeroFill) {
  Mem m;
  ASSERT_TRUE(m.MapRegion(0x5000, {}, 4096, Prot::R()).ok());
  auto r = m.ReadBytes(0x5000, 4096);
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(*r, std::vector<uint8_t>(4096, 0));
  EXPECT_FALSE(m.IsMapped(0x6000));
  EXPECT_FALSE(m.IsMapped(0x4fff));
}

TEST(MemTest, MapWrapAroundRejected) {
  Mem m;
  auto s = m.MapRegion(~uint64_t{0} - 1, V({1, 2, 3, 4}), 0, Prot::RW());
  ASSERT_FALSE(s.ok());
  EXPECT_EQ(s.error(), MapError::kWrapAround);
  EXPECT_EQ(m, Mem{});
  // Exactly reaching the top is fine.
  EXPECT_TRUE(m.MapRegion(~uint64_t{0} - 1, V({1, 2}), 0, Prot::RW()).ok());
}

TEST(MemTest, ReadChecksProtection) {
  Mem m;
  ASSERT_TRUE(m.MapRegion(0x1000, V({0xAB}), 0, Prot::R()).ok());
  ASSERT_TRUE(m.MapRegion(0x2000, V({0xCD}), 0, Prot{false, true, false}).ok());
  EXPECT_EQ(*m.ReadBytes(0x1000, 1), V({0xAB}));
  auto r = m.ReadBytes(0x2000, 1);
  ASSERT_FALSE(r.ok());
  EXPECT_EQ(r.error(),
            (MemFault{0x2000, Access::kRead, MemFaultCause::kProtViolation}));
}

TEST(MemTest, ZeroLengthNeverFaults) {
  Mem m;
  auto r = m.ReadBytes(0xdead0000, 0);
  ASSERT_TRUE(r.ok());
  EXPECT_TRUE(r->empty());
  EXPECT_TRUE(m.WriteBytes(0xdead0000, {}).ok());
  EXPECT_EQ(m, Mem{});
}

TEST(MemTest, UnmappedFaultsOnEveryPath) {
  Mem m;
  ASSERT_TRUE(m.MapRegion(0x1000, {}, 16, Prot::RWX()).ok());
  const MemFault want{0x1010, Access::kRead, MemFaultCause::kUnmapped};
  EXPECT_EQ(m.ReadBytes(0x100c, 8).error(), want);
  EXPECT_EQ(m.WriteBytes(0x1010, V({1})).error().access, Access::kWrite);
  EXPECT_EQ(m.FetchBytes(0x1010, 1).error().access, Access::kFetch);
  EXPECT_EQ(m.page_count(), 1u);
}

TEST(MemTest, WriteThenRead) {
  Mem m;
  ASSERT_TRUE(m.MapRegion(0x3000, {}, 4096, Prot::RW()).ok());
  ASSERT_TRUE(m.WriteBytes(0x3000, V({0x01})).ok());
  EXPECT_EQ(*m.ReadBytes(0x3000, 1), V({0x01}));
}

TEST(MemTest, WriteAcrossIntoReadOnlyIsAtomic) {
  Mem m;
  ASSERT_TRUE(m.MapRegion(0x1000, {}, 4096, Prot::RW()).ok());
  ASSERT_TRUE(m.MapRegion(0x2000, {}, 4096, Prot::R()).ok());
  const Mem before = m;
  auto s = m.WriteBytes(0x1ffe, V({9, 9, 9, 9}));
  ASSERT_FALSE(s.ok());
  EXPECT_EQ(s.error(),
            (MemFault{0x2000, Access::kWrite, MemFaultCause::kProtViolation}));
  EXPECT_EQ(m, before);
  EXPECT_EQ(*m.ReadBytes(0x1ffe, 2), V({0, 0}));
}

TEST(MemTest, EmptyWriteIsIdentity) {
  Mem m;
  ASSERT_TRUE(m.MapRegion(0x1000, V({5}), 0, Prot::R()).ok());
  const Mem before = m;
  EXPECT_TRUE(m.WriteBytes(0x1000, {}).ok());
  EXPECT_EQ(m, before);
}

TEST(MemTest, Fetch) {
  Mem m;
  ASSERT_TRUE(m.MapRegion(0x1000, V({0x90}), 4096, Prot::RX()).ok());
  ASSERT_TRUE(m.MapRegion(0x2000, V({0x90}), 4096, Prot::RW()).ok());
  EXPECT_EQ(*m.FetchBytes(0x1000, 1), V({0x90}));
  EXPECT_EQ(m.FetchBytes(0x2000, 1).error(),
            (MemFault{0x2000, Access::kFetch, MemFaultCause::kProtViolation}));
  // Spanning exec into non-exec.
  EXPECT_EQ(m.FetchBytes(0x1ffe, 4).error().addr, 0x2000u);
  auto w = m.FetchPrefix(0x1ffe, 4);
  EXPECT_EQ(w.bytes.size(), 2u);
  ASSERT_TRUE(w.fault.has_value());
  EXPECT_EQ(w.fault->addr, 0x2000u);
  EXPECT_FALSE(m.FetchPrefix(0x1000, 15).fault.has_value());
}

TEST(MemTest, ProtMatrix) {
  for (uint8_t bits = 0; bits < 8; ++bits) {
    const Prot p = Prot::FromBits(bits);
    Mem m;
    ASSERT_TRUE(m.MapRegion(0x7000, V({0x42}), 0, p).ok());
    const Mem before = m;
    EXPECT_EQ(m.ReadBytes(0x7000, 1).ok(), p.read) << int(bits);
    EXPECT_EQ(m.FetchBytes(0x7000, 1).ok(), p.exec) << int(bits);
    const bool wrote = m.WriteBytes(0x7000, V({0x43})).ok();
    EXPECT_EQ(wrote, p.write) << int(bits);
    if (!wrote) {
      EXPECT_EQ(m, before);
    }
    EXPECT_EQ(m.ProtAt(0x7000), p);
  }
}

TEST(MemTest, RemapReplaces) {
  Mem m;
  ASSERT_TRUE(m.MapRegion(0x1000, V({1, 2, 3}), 0, Prot::RW()).ok());
  ASSERT_TRUE(m.MapRegion(0x1001, V({7}), 0, Prot::R()).ok());
  EXPECT_EQ(*m.ReadBytes(0x1000, 3), V({1, 7, 3}));
  EXPECT_EQ(m.ProtAt(0x1001), Prot::R());
  EXPECT_EQ(m.ProtAt(0x1002), Prot::RW());
}

TEST(MemTest, ReadAfterWriteAndFrameProperty) {
  std::mt19937_64 rng(17);
  Mem m;
  constexpr uint64_t kBase = 0x10000, kLen = 3 * 4096;
  std::vector<uint8_t> init(kLen);
  for (auto& b : init) b = static_cast<uint8_t>(rng());
  ASSERT_TRUE(m.MapRegion(kBase, init, 0, Prot::RW()).ok());
  std::vector<uint8_t> shadow = init;
  for (int iter = 0; iter < 500; ++iter) {
    const uint64_t off = rng() % kLen;
    const uint64_t len = rng() % std::min<uint64_t>(kLen - off, 9000);
    std::vector<uint8_t> data(len);
    for (auto& b : data) b = static_cast<uint8_t>(rng());
    ASSERT_TRUE(m.WriteBytes(kBase + off, data).ok());
    std::copy(data.begin(), data.end(), shadow.begin() + off);
    ASSERT_EQ(*m.ReadBytes(kBase + off, len), data);
    ASSERT_EQ(*m.ReadBytes(kBase, kLen), shadow);
    ASSERT_EQ(m.ProtAt(kBase + off), Prot::RW());
  }
}

TEST(MemTest, AnyMapped) {
  Mem m;
  ASSERT_TRUE(m.MapRegion(0x5000, {}, 1, Prot::R()).ok());
  EXPECT_TRUE(m.AnyMapped(0x4000, 0x1001));
  EXPECT_FALSE(m.AnyMapped(0x4000, 0x1000));
  EXPECT_FALSE(m.AnyMapped(0x5001, 0x10000));
}

}  // namespace
}  // namespace runsem
