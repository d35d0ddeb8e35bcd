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

#include "runsem/decoder.h"

#include <gtest/gtest.h>

#include <random>
#include <vector>

#include "fixtures.h"

namespace runsem {
namespace {

using B = std::vector<uint8_t>;

Result<Instr, DecodeFault> Dec(const B& b) { return DecodeInstr(b); }

std::string Text(const B& b, uint64_t addr = 0) {
  auto r = DecodeInstr(b);
  return r.ok() ? FormatInstr(*r, addr) : "<" + Describe(r.error()) + ">";
}

TEST(DecoderTest, Nop) {
  auto r = Dec({0x90});
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->mnemonic, Mnemonic::kNop);
  EXPECT_EQ(r->len, 1);
}

TEST(DecoderTest, MulRbx) {
  auto r = Dec({0x48, 0xF7, 0xE3});
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->mnemonic, Mnemonic::kMul);
  EXPECT_EQ(r->sz, WSize::kSz64);
  EXPECT_EQ(r->len, 3);
  ASSERT_EQ(r->num_operands, 1);
  ASSERT_TRUE(r->op(0).is_reg());
  EXPECT_EQ(r->op(0).reg(), kRbx);
}

TEST(DecoderTest, Syscall) {
  auto r = Dec({0x0F, 0x05});
  ASSERT_TRUE(r.ok());
  EXPECT_EQ(r->mnemonic, Mnemonic::kSyscall);
  EXPECT_EQ(r->len, 2);
}

TEST(DecoderTest, Prefixes) {
  B rexw{0x48, 0x01, 0xc0};
  auto p = DecodePrefixes(rexw);
  ASSERT_TRUE(p.ok());
  ASSERT_TRUE(p->rex.has_value());
  EXPECT_TRUE(p->rex->w);
  EXPECT_EQ(p->consumed, 1);

  B opsz{0x66, 0x01, 0xc0};
  p = DecodePrefixes(opsz);
  ASSERT_TRUE(p.ok());
  EXPECT_TRUE(p->operand_size_override);
  EXPECT_FALSE(p->rex.has_value());
  EXPECT_EQ(p->consumed, 1);

  B none{0x01, 0xc0};
  p = DecodePrefixes(none);
  ASSERT_TRUE(p.ok());
  EXPECT_EQ(p->consumed, 0);
  EXPECT_FALSE(p->operand_size_override);
}

TEST(DecoderTest, PrefixRules) {
  // REX not last, repeated 0x66, other legacy prefixes.
  EXPECT_EQ(Dec({0x48, 0x66, 0x01, 0xc0}).error().kind,
            DecodeFaultKind::kUnsupportedForm);
  EXPECT_EQ(Dec({0x66, 0x66, 0x01, 0xc0}).error().kind,
            DecodeFaultKind::kUnsupportedForm);
  for (uint8_t p :
       {0xF0, 0xF2, 0xF3, 0x2E, 0x36, 0x3E, 0x26, 0x64, 0x65, 0x67}) {
    EXPECT_EQ(Dec({p, 0x01, 0xc0}).error().kind,
              DecodeFaultKind::kUnsupportedForm)
        << int(p);
  }
  // 0x66 then REX is the legal order.
  EXPECT_EQ(Text({0x66, 0x41, 0x01, 0xc0}), "add r8w,ax");
}

TEST(DecoderTest, ModRMRegDirect) {
  B b{0xC3};
  auto m = DecodeModRM(b, std::nullopt);
  ASSERT_TRUE(m.ok());
  EXPECT_EQ(m->reg_field, kRax);
  EXPECT_EQ(m->mod, 3);
  EXPECT_EQ(m->rm, RMForm(RegOperand{kRbx}));
  EXPECT_EQ(m->consumed, 1);
  // REX.B and REX.R extend.
  m = DecodeModRM(b, Rex{false, true, false, true});
  EXPECT_EQ(m->reg_field, kR8);
  EXPECT_EQ(m->rm, RMForm(RegOperand{kR11}));
}

TEST(DecoderTest, ModRMRipRelative) {
  B b{0x05, 0x10, 0x00, 0x00, 0x00};
  auto m = DecodeModRM(b, std::nullopt);
  ASSERT_TRUE(m.ok());
  const auto& mem = std::get<MemRef>(m->rm);
  EXPECT_TRUE(mem.rip_relative);
  EXPECT_EQ(mem.disp, 0x10);
  EXPECT_FALSE(mem.base.has_value());
  EXPECT_EQ(m->consumed, 5);
}

TEST(DecoderTest, ModRMSibForms) {
  // [rbx+rcx*4-0x8]
  B b{0x44, 0x8B, 0xF8};
  auto m = DecodeModRM(b, std::nullopt);
  ASSERT_TRUE(m.ok());
  auto mem = std::get<MemRef>(m->rm);
  EXPECT_EQ(mem.base, kRbx);
  EXPECT_EQ(mem.index, kRcx);
  EXPECT_EQ(mem.scale, 4);
  EXPECT_EQ(mem.disp, -8);
  // index=100 means no index; base=101 with mod=00 means disp32 only.
  B abs{0x04, 0x25, 0x00, 0x10, 0x00, 0x00};
  mem = std::get<MemRef>(DecodeModRM(abs, std::nullopt)->rm);
  EXPECT_FALSE(mem.base.has_value());
  EXPECT_FALSE(mem.index.has_value());
  EXPECT_EQ(mem.disp, 0x1000);
  // REX.X turns index 100 into r12, which is a real index.
  B r12{0x04, 0x20};
  mem = std::get<MemRef>(DecodeModRM(r12, Rex{false, false, true, false})->rm);
  EXPECT_EQ(mem.index, kR12);
  EXPECT_EQ(mem.base, kRax);
}

TEST(DecoderTest, TruncatedModRM) {
  B b{0x84};
  auto m = DecodeModRM(b, std::nullopt);
  ASSERT_FALSE(m.ok());
  EXPECT_EQ(m.error().kind, DecodeFaultKind::kTruncated);
  EXPECT_EQ(Dec({0x48}).error().kind, DecodeFaultKind::kTruncated);
  EXPECT_EQ(Dec({0xB8, 0x01, 0x02}).error().kind, DecodeFaultKind::kTruncated);
  EXPECT_EQ(Dec({}).error().kind, DecodeFaultKind::kTruncated);
}

TEST(DecoderTest, UnknownAndUnsupported) {
  EXPECT_EQ(Dec({0x0F, 0x0B}).error().kind, DecodeFaultKind::kUnknownOpcode);
  EXPECT_EQ(Dec({0xF4}).error().kind, DecodeFaultKind::kUnknownOpcode);
  EXPECT_EQ(Dec({0xFF, 0xF8}).error().kind, DecodeFaultKind::kUnknownOpcode);
  // High-byte registers without REX.
  EXPECT_EQ(Dec({0x88, 0xE0}).error().kind, DecodeFaultKind::kUnsupportedForm);
  EXPECT_EQ(Dec({0xF6, 0xC4, 0x01}).error().kind,
            DecodeFaultKind::kUnsupportedForm);
  EXPECT_EQ(Dec({0xB4, 0x01}).error().kind, DecodeFaultKind::kUnsupportedForm);
  // ...but with any REX they are spl/bpl/sil/dil.
  EXPECT_EQ(Text({0x40, 0x88, 0xE0}), "mov al,spl");
  // movsxd without REX.W, push with 0x66.
  EXPECT_EQ(Dec({0x63, 0xC3}).error().kind, DecodeFaultKind::kUnsupportedForm);
  EXPECT_EQ(Dec({0x66, 0x50}).error().kind, DecodeFaultKind::kUnsupportedForm);
  // LEA needs a memory operand.
  EXPECT_NE(Dec({0x48, 0x8D, 0xC0}).ok(), true);
}

TEST(DecoderTest, LengthCapAndGarbageInvariance) {
  std::mt19937_64 rng(3);
  const auto corpus = testkit::LoadDecodeCorpus();
  for (const auto& e : corpus) {
    const auto base = DecodeInstr(e.bytes);
    ASSERT_TRUE(base.ok()) << e.text;
    // First len bytes alone reproduce the same instruction.
    B exact(e.bytes.begin(), e.bytes.begin() + base->len);
    ASSERT_EQ(*DecodeInstr(exact), *base);
    for (int t = 0; t < 20; ++t) {
      B padded = exact;
      const size_t extra = rng() % 16;
      for (size_t i = 0; i < extra; ++i) padded.push_back(rng());
      const auto again = DecodeInstr(padded);
      ASSERT_TRUE(again.ok());
      ASSERT_EQ(*again, *base) << e.text;
    }
  }
}

TEST(DecoderTest, DeterministicOnRandomBytes) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 20000; ++i) {
    B b(1 + rng() % 15);
    for (auto& x : b) x = rng();
    const auto r1 = DecodeInstr(b);
    const auto r2 = DecodeInstr(b);
    ASSERT_EQ(r1.ok(), r2.ok());
    if (r1.ok()) {
      ASSERT_EQ(*r1, *r2);
      ASSERT_LE(r1->len, b.size());
      ASSERT_GE(r1->len, 1);
    } else {
      ASSERT_EQ(r1.error(), r2.error());
    }
  }
}

TEST(DecoderTest, RenderingDetails) {
  EXPECT_EQ(Text({0x66, 0x90}), "xchg ax,ax");
  EXPECT_EQ(Text({0x41, 0x90}), "xchg r8d,eax");
  EXPECT_EQ(Text({0x49, 0x90}), "xchg r8,rax");
  EXPECT_EQ(Text({0x48, 0x99}), "cqo");
  EXPECT_EQ(Text({0xD1, 0xE0}), "shl eax,1");
  EXPECT_EQ(Text({0xEB, 0xFE}, 0x401000), "jmp 0x401000");
  EXPECT_EQ(Text({0xE8, 0x00, 0x00, 0x00, 0x00}, 0x401000), "call 0x401005");
  EXPECT_EQ(Text({0x48, 0xB8, 1, 0, 0, 0, 0, 0, 0, 0}), "movabs rax,0x1");
  EXPECT_EQ(Text({0x6A, 0xFF}), "push 0xffffffffffffffff");
  EXPECT_EQ(Text({0x0F, 0x1F, 0x44, 0x00, 0x00}),
            "nop DWORD PTR [rax+rax*1+0x0]");
  EXPECT_EQ(Text({0x0F, 0x05}), "syscall");
  EXPECT_EQ(Text({0xC3}), "ret");
}

TEST(DecoderTest, ConditionSuffixes) {
  const char* want[] = {"o", "no", "b", "ae", "e", "ne", "be", "a",
                        "s", "ns", "p", "np", "l", "ge", "le", "g"};
  for (uint8_t cc = 0; cc < 16; ++cc) EXPECT_EQ(ConditionSuffix(cc), want[cc]);
}

TEST(DecoderTest, CorpusAgreement) {
  const auto corpus = testkit::LoadDecodeCorpus();
  ASSERT_GE(corpus.size(), 50u);
  for (const auto& e : corpus) {
    auto r = DecodeInstr(e.bytes);
    ASSERT_TRUE(r.ok()) << e.text << ": " << Describe(r.error());
    EXPECT_EQ(r->len, e.length) << e.text;
    EXPECT_EQ(FormatInstr(*r, e.addr), e.text);
  }
}

}  // namespace
}  // namespace runsem
