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

#include <algorithm>

#include "fmt/format.h"

namespace runsem {
namespace {

// Operand templates, in the usual opcode-map notation.
enum class Tmpl : uint8_t {
  kNone,
  kE,    // ModRM r/m at operand size
  kG,    // ModRM reg at operand size
  kM,    // ModRM r/m, memory form only
  kEb,   // ModRM r/m, always 8 bits (movzx/movsx source)
  kEw,   // ModRM r/m, always 16 bits
  kEd,   // ModRM r/m, always 32 bits (movsxd source)
  kIb,   // imm8 sign-extended to operand size
  kIbU,  // imm8 shift count
  kIz,   // imm16/imm32 sign-extended to operand size
  kIv,   // immediate of the full operand size
  kAcc,  // AL/AX/EAX/RAX
  kCl,   // CL shift count
  kOne,  // implicit shift count 1
  kZr,   // register in the opcode's low three bits (+REX.B)
  kRel8,
  kRel32,
};

enum class SizeRule : uint8_t {
  kByte,   // always 8 bits
  kVar,    // 16/32/64 from 0x66 and REX.W
  kStack,  // always 64 bits; 0x66 is rejected
  kNone,   // no operands; 0x66 is rejected
};

struct Row {
  Mnemonic mnemonic = Mnemonic::kNop;
  SizeRule size = SizeRule::kNone;
  std::array<Tmpl, kMaxOperands> ops{};
  uint8_t cond = 0;

  bool needs_modrm() const {
    return std::any_of(ops.begin(), ops.end(), [](Tmpl t) {
      return t == Tmpl::kE || t == Tmpl::kG || t == Tmpl::kM ||
             t == Tmpl::kEb || t == Tmpl::kEw || t == Tmpl::kEd;
    });
  }
};

struct Entry {
  enum class Kind : uint8_t { kAbsent, kRow, kGroup } kind = Kind::kAbsent;
  Row row;
  std::array<std::optional<Row>, 8> group;  // indexed by ModRM.reg
};

struct Tables {
  std::array<Entry, 256> one;
  std::array<Entry, 256> two;
};

Row R(Mnemonic m, SizeRule size, Tmpl a = Tmpl::kNone, Tmpl b = Tmpl::kNone,
      Tmpl c = Tmpl::kNone) {
  return Row{m, size, {a, b, c}, 0};
}

Tables BuildTables() {
  using M = Mnemonic;
  using S = SizeRule;
  using T = Tmpl;
  Tables t;
  auto set = [](Entry& e, Row row) {
    e.kind = Entry::Kind::kRow;
    e.row = row;
  };
  auto grp = [](Entry& e, int reg, Row row) {
    e.kind = Entry::Kind::kGroup;
    e.group[reg] = row;
  };

  constexpr std::array<M, 8> kAlu = {M::kAdd, M::kOr,  M::kAdc, M::kSbb,
                                     M::kAnd, M::kSub, M::kXor, M::kCmp};
  for (int i = 0; i < 8; ++i) {
    const int base = i * 8;
    set(t.one[base + 0], R(kAlu[i], S::kByte, T::kE, T::kG));
    set(t.one[base + 1], R(kAlu[i], S::kVar, T::kE, T::kG));
    set(t.one[base + 2], R(kAlu[i], S::kByte, T::kG, T::kE));
    set(t.one[base + 3], R(kAlu[i], S::kVar, T::kG, T::kE));
    set(t.one[base + 4], R(kAlu[i], S::kByte, T::kAcc, T::kIb));
    set(t.one[base + 5], R(kAlu[i], S::kVar, T::kAcc, T::kIz));
    grp(t.one[0x80], i, R(kAlu[i], S::kByte, T::kE, T::kIb));
    grp(t.one[0x81], i, R(kAlu[i], S::kVar, T::kE, T::kIz));
    grp(t.one[0x83], i, R(kAlu[i], S::kVar, T::kE, T::kIb));
  }
  for (int r = 0; r < 8; ++r) {
    set(t.one[0x50 + r], R(M::kPush, S::kStack, T::kZr));
    set(t.one[0x58 + r], R(M::kPop, S::kStack, T::kZr));
    set(t.one[0x90 + r], R(M::kXchg, S::kVar, T::kZr, T::kAcc));
    set(t.one[0xB0 + r], R(M::kMov, S::kByte, T::kZr, T::kIb));
    set(t.one[0xB8 + r], R(M::kMov, S::kVar, T::kZr, T::kIv));
  }
  set(t.one[0x63], R(M::kMovsxd, S::kVar, T::kG, T::kEd));
  set(t.one[0x68], R(M::kPush, S::kStack, T::kIz));
  set(t.one[0x69], R(M::kImul, S::kVar, T::kG, T::kE, T::kIz));
  set(t.one[0x6A], R(M::kPush, S::kStack, T::kIb));
  set(t.one[0x6B], R(M::kImul, S::kVar, T::kG, T::kE, T::kIb));
  for (int cc = 0; cc < 16; ++cc) {
    Row jcc8 = R(M::kJcc, S::kStack, T::kRel8);
    jcc8.cond = cc;
    set(t.one[0x70 + cc], jcc8);
    Row jcc32 = R(M::kJcc, S::kStack, T::kRel32);
    jcc32.cond = cc;
    set(t.two[0x80 + cc], jcc32);
    Row setcc = R(M::kSetcc, S::kByte, T::kE);
    setcc.cond = cc;
    grp(t.two[0x90 + cc], 0, setcc);
    Row cmov = R(M::kCmovcc, S::kVar, T::kG, T::kE);
    cmov.cond = cc;
    set(t.two[0x40 + cc], cmov);
  }
  set(t.one[0x84], R(M::kTest, S::kByte, T::kE, T::kG));
  set(t.one[0x85], R(M::kTest, S::kVar, T::kE, T::kG));
  set(t.one[0x86], R(M::kXchg, S::kByte, T::kE, T::kG));
  set(t.one[0x87], R(M::kXchg, S::kVar, T::kE, T::kG));
  set(t.one[0x88], R(M::kMov, S::kByte, T::kE, T::kG));
  set(t.one[0x89], R(M::kMov, S::kVar, T::kE, T::kG));
  set(t.one[0x8A], R(M::kMov, S::kByte, T::kG, T::kE));
  set(t.one[0x8B], R(M::kMov, S::kVar, T::kG, T::kE));
  set(t.one[0x8D], R(M::kLea, S::kVar, T::kG, T::kM));
  grp(t.one[0x8F], 0, R(M::kPop, S::kStack, T::kE));
  set(t.one[0x99], R(M::kCdq, S::kVar));
  set(t.one[0xA8], R(M::kTest, S::kByte, T::kAcc, T::kIb));
  set(t.one[0xA9], R(M::kTest, S::kVar, T::kAcc, T::kIz));
  set(t.one[0xC3], R(M::kRet, S::kNone));
  grp(t.one[0xC6], 0, R(M::kMov, S::kByte, T::kE, T::kIb));
  grp(t.one[0xC7], 0, R(M::kMov, S::kVar, T::kE, T::kIz));

  constexpr std::array<std::pair<int, M>, 3> kShifts = {
      {{4, M::kShl}, {5, M::kShr}, {7, M::kSar}}};
  for (auto [reg, m] : kShifts) {
    grp(t.one[0xC0], reg, R(m, S::kByte, T::kE, T::kIbU));
    grp(t.one[0xC1], reg, R(m, S::kVar, T::kE, T::kIbU));
    grp(t.one[0xD0], reg, R(m, S::kByte, T::kE, T::kOne));
    grp(t.one[0xD1], reg, R(m, S::kVar, T::kE, T::kOne));
    grp(t.one[0xD2], reg, R(m, S::kByte, T::kE, T::kCl));
    grp(t.one[0xD3], reg, R(m, S::kVar, T::kE, T::kCl));
  }

  set(t.one[0xE8], R(M::kCall, S::kStack, T::kRel32));
  set(t.one[0xE9], R(M::kJmp, S::kStack, T::kRel32));
  set(t.one[0xEB], R(M::kJmp, S::kStack, T::kRel8));

  grp(t.one[0xF6], 0, R(M::kTest, S::kByte, T::kE, T::kIb));
  grp(t.one[0xF7], 0, R(M::kTest, S::kVar, T::kE, T::kIz));
  constexpr std::array<std::pair<int, M>, 6> kUnary = {{{2, M::kNot},
                                                        {3, M::kNeg},
                                                        {4, M::kMul},
                                                        {5, M::kImul},
                                                        {6, M::kDiv},
                                                        {7, M::kIdiv}}};
  for (auto [reg, m] : kUnary) {
    grp(t.one[0xF6], reg, R(m, S::kByte, T::kE));
    grp(t.one[0xF7], reg, R(m, S::kVar, T::kE));
  }
  grp(t.one[0xFE], 0, R(M::kInc, S::kByte, T::kE));
  grp(t.one[0xFE], 1, R(M::kDec, S::kByte, T::kE));
  grp(t.one[0xFF], 0, R(M::kInc, S::kVar, T::kE));
  grp(t.one[0xFF], 1, R(M::kDec, S::kVar, T::kE));
  grp(t.one[0xFF], 2, R(M::kCall, S::kStack, T::kE));
  grp(t.one[0xFF], 4, R(M::kJmp, S::kStack, T::kE));
  grp(t.one[0xFF], 6, R(M::kPush, S::kStack, T::kE));

  set(t.two[0x05], R(M::kSyscall, S::kNone));
  grp(t.two[0x1F], 0, R(M::kNop, S::kVar, T::kE));
  set(t.two[0xAF], R(M::kImul, S::kVar, T::kG, T::kE));
  set(t.two[0xB6], R(M::kMovzx, S::kVar, T::kG, T::kEb));
  set(t.two[0xB7], R(M::kMovzx, S::kVar, T::kG, T::kEw));
  set(t.two[0xBE], R(M::kMovsx, S::kVar, T::kG, T::kEb));
  set(t.two[0xBF], R(M::kMovsx, S::kVar, T::kG, T::kEw));
  return t;
}

const Tables& GetTables() {
  static const Tables tables = BuildTables();
  return tables;
}

bool IsLegacyPrefix(uint8_t b) {
  switch (b) {
    case 0xF0:
    case 0xF2:
    case 0xF3:
    case 0x26:
    case 0x2E:
    case 0x36:
    case 0x3E:
    case 0x64:
    case 0x65:
    case 0x67:
      return true;
    default:
      return false;
  }
}

DecodeFault Fault(DecodeFaultKind kind, size_t offset) {
  return DecodeFault{kind, static_cast<uint8_t>(std::min<size_t>(offset, 255))};
}

// Little-endian immediate of `n` bytes at bytes[pos].
std::optional<uint64_t> ReadLE(std::span<const uint8_t> bytes, size_t pos,
                               size_t n) {
  if (pos + n > bytes.size()) return std::nullopt;
  uint64_t v = 0;
  for (size_t i = 0; i < n; ++i) v |= uint64_t{bytes[pos + i]} << (8 * i);
  return v;
}

}  // namespace

std::string Describe(const DecodeFault& fault) {
  switch (fault.kind) {
    case DecodeFaultKind::kUnknownOpcode:
      return fmt::format("unknown opcode (byte {})", fault.offset);
    case DecodeFaultKind::kUnsupportedForm:
      return fmt::format("unsupported instruction form (byte {})",
                         fault.offset);
    case DecodeFaultKind::kTruncated:
      return fmt::format("truncated instruction (byte {})", fault.offset);
  }
  return "decode fault";
}

Result<Prefixes, DecodeFault> DecodePrefixes(std::span<const uint8_t> bytes) {
  Prefixes p;
  size_t i = 0;
  for (; i < bytes.size(); ++i) {
    const uint8_t b = bytes[i];
    const bool is_rex = (b & 0xF0) == 0x40;
    if (b != 0x66 && !is_rex) {
      if (IsLegacyPrefix(b)) return Fault(DecodeFaultKind::kUnsupportedForm, i);
      break;
    }
    // REX must be the last prefix, and each prefix may appear once.
    if (p.rex) return Fault(DecodeFaultKind::kUnsupportedForm, i);
    if (is_rex) {
      p.rex = Rex::FromByte(b);
    } else {
      if (p.operand_size_override) {
        return Fault(DecodeFaultKind::kUnsupportedForm, i);
      }
      p.operand_size_override = true;
    }
  }
  p.consumed = static_cast<uint8_t>(i);
  return p;
}

Result<ModRM, DecodeFault> DecodeModRM(std::span<const uint8_t> bytes,
                                       std::optional<Rex> rex) {
  const Rex x = rex.value_or(Rex{});
  if (bytes.empty()) return Fault(DecodeFaultKind::kTruncated, 0);
  const uint8_t modrm = bytes[0];
  ModRM out;
  out.mod = modrm >> 6;
  out.reg_field = static_cast<uint8_t>(((modrm >> 3) & 7) | (x.r ? 8 : 0));
  const uint8_t rm = modrm & 7;
  size_t pos = 1;

  if (out.mod == 3) {
    out.rm = RegOperand{static_cast<uint8_t>(rm | (x.b ? 8 : 0))};
    out.consumed = 1;
    return out;
  }

  MemRef mem;
  size_t disp_bytes = out.mod == 1 ? 1 : out.mod == 2 ? 4 : 0;
  if (rm == 4) {
    if (pos >= bytes.size()) return Fault(DecodeFaultKind::kTruncated, pos);
    const uint8_t sib = bytes[pos++];
    const uint8_t index =
        static_cast<uint8_t>(((sib >> 3) & 7) | (x.x ? 8 : 0));
    const uint8_t base = sib & 7;
    mem.scale = static_cast<uint8_t>(1u << (sib >> 6));
    if (index != kRsp) mem.index = index;
    if (base == 5 && out.mod == 0) {
      disp_bytes = 4;
    } else {
      mem.base = static_cast<uint8_t>(base | (x.b ? 8 : 0));
    }
  } else if (rm == 5 && out.mod == 0) {
    mem.rip_relative = true;
    disp_bytes = 4;
  } else {
    mem.base = static_cast<uint8_t>(rm | (x.b ? 8 : 0));
  }

  if (disp_bytes > 0) {
    auto raw = ReadLE(bytes, pos, disp_bytes);
    if (!raw) return Fault(DecodeFaultKind::kTruncated, bytes.size());
    mem.disp = disp_bytes == 1
                   ? static_cast<int8_t>(*raw)
                   : static_cast<int32_t>(static_cast<uint32_t>(*raw));
    pos += disp_bytes;
  }
  // Without an index the scale field is meaningless; keep the form canonical.
  if (!mem.index) mem.scale = 1;
  mem.disp_bytes = static_cast<uint8_t>(disp_bytes);
  out.rm = mem;
  out.consumed = static_cast<uint8_t>(pos);
  return out;
}

Result<Instr, DecodeFault> DecodeInstr(std::span<const uint8_t> bytes) {
  bytes = bytes.first(std::min(bytes.size(), Mem::kMaxFetch));
  auto prefixes = DecodePrefixes(bytes);
  if (!prefixes) return prefixes.error();
  const Prefixes& pre = *prefixes;
  size_t pos = pre.consumed;
  if (pos >= bytes.size()) return Fault(DecodeFaultKind::kTruncated, pos);

  const Tables& tables = GetTables();
  const size_t opcode_pos = pos;
  uint16_t opcode = bytes[pos++];
  const Entry* entry = &tables.one[opcode];
  if (opcode == 0x0F) {
    if (pos >= bytes.size()) return Fault(DecodeFaultKind::kTruncated, pos);
    opcode = 0x0F00 | bytes[pos];
    entry = &tables.two[bytes[pos++]];
  }

  Instr instr;
  instr.opcode = opcode;

  // 0x90 without REX.B is NOP rather than xchg eax,eax.
  if (opcode == 0x90 && !(pre.rex && pre.rex->b)) {
    instr.mnemonic = Mnemonic::kNop;
    instr.sz = pre.operand_size_override ? WSize::kSz16 : WSize::kSz32;
    instr.len = static_cast<uint8_t>(pos);
    return instr;
  }

  const Row* row = nullptr;
  switch (entry->kind) {
    case Entry::Kind::kAbsent:
      return Fault(DecodeFaultKind::kUnknownOpcode, opcode_pos);
    case Entry::Kind::kRow:
      row = &entry->row;
      break;
    case Entry::Kind::kGroup: {
      if (pos >= bytes.size()) return Fault(DecodeFaultKind::kTruncated, pos);
      const auto& slot = entry->group[(bytes[pos] >> 3) & 7];
      if (!slot) return Fault(DecodeFaultKind::kUnknownOpcode, opcode_pos);
      row = &*slot;
      break;
    }
  }

  instr.mnemonic = row->mnemonic;
  instr.cond = row->cond;
  switch (row->size) {
    case SizeRule::kByte:
      instr.sz = WSize::kSz8;
      break;
    case SizeRule::kVar:
      instr.sz = (pre.rex && pre.rex->w)     ? WSize::kSz64
                 : pre.operand_size_override ? WSize::kSz16
                                             : WSize::kSz32;
      break;
    case SizeRule::kStack:
    case SizeRule::kNone:
      if (pre.operand_size_override) {
        return Fault(DecodeFaultKind::kUnsupportedForm, 0);
      }
      instr.sz = WSize::kSz64;
      break;
  }
  if (row->mnemonic == Mnemonic::kMovsxd && instr.sz != WSize::kSz64) {
    return Fault(DecodeFaultKind::kUnsupportedForm, opcode_pos);
  }

  std::optional<ModRM> modrm;
  if (row->needs_modrm()) {
    auto decoded = DecodeModRM(bytes.subspan(pos), pre.rex);
    if (!decoded) {
      return Fault(decoded.error().kind, pos + decoded.error().offset);
    }
    modrm = *decoded;
    pos += modrm->consumed;
  }

  // Byte registers 4-7 name ah/ch/dh/bh unless a REX prefix is present.
  auto check_byte_reg = [&](uint8_t reg, WSize sz) {
    return !(sz == WSize::kSz8 && !pre.rex && reg >= 4 && reg < 8);
  };

  const WSize sz = instr.sz;
  for (Tmpl tmpl : row->ops) {
    if (tmpl == Tmpl::kNone) break;
    Operand op;
    op.sz = sz;
    switch (tmpl) {
      case Tmpl::kNone:
        break;
      case Tmpl::kE:
      case Tmpl::kM:
      case Tmpl::kEb:
      case Tmpl::kEw:
      case Tmpl::kEd: {
        if (tmpl == Tmpl::kEb) op.sz = WSize::kSz8;
        if (tmpl == Tmpl::kEw) op.sz = WSize::kSz16;
        if (tmpl == Tmpl::kEd) op.sz = WSize::kSz32;
        if (const auto* reg = std::get_if<RegOperand>(&modrm->rm)) {
          if (tmpl == Tmpl::kM || !check_byte_reg(reg->reg, op.sz)) {
            return Fault(DecodeFaultKind::kUnsupportedForm, opcode_pos);
          }
          op.value = *reg;
        } else {
          op.value = std::get<MemRef>(modrm->rm);
        }
        break;
      }
      case Tmpl::kG:
        if (!check_byte_reg(modrm->reg_field, sz)) {
          return Fault(DecodeFaultKind::kUnsupportedForm, opcode_pos);
        }
        op.value = RegOperand{modrm->reg_field};
        break;
      case Tmpl::kAcc:
        op.value = RegOperand{kRax};
        break;
      case Tmpl::kCl:
        op.value = RegOperand{kRcx};
        op.sz = WSize::kSz8;
        break;
      case Tmpl::kOne:
        op.value = ImmOperand{1, true};
        op.sz = WSize::kSz8;
        break;
      case Tmpl::kZr: {
        const uint8_t reg = static_cast<uint8_t>(
            (opcode & 7) | (pre.rex && pre.rex->b ? 8 : 0));
        if (!check_byte_reg(reg, sz)) {
          return Fault(DecodeFaultKind::kUnsupportedForm, opcode_pos);
        }
        op.value = RegOperand{reg};
        break;
      }
      case Tmpl::kIb:
      case Tmpl::kIbU:
      case Tmpl::kIz:
      case Tmpl::kIv: {
        size_t n = 1;
        if (tmpl == Tmpl::kIz) n = sz == WSize::kSz16 ? 2 : 4;
        if (tmpl == Tmpl::kIv) n = Bytes(sz);
        auto raw = ReadLE(bytes, pos, n);
        if (!raw) return Fault(DecodeFaultKind::kTruncated, bytes.size());
        pos += n;
        if (tmpl == Tmpl::kIbU) {
          op.sz = WSize::kSz8;
          op.value = ImmOperand{*raw, false};
        } else {
          const WSize raw_sz = n == 1   ? WSize::kSz8
                               : n == 2 ? WSize::kSz16
                               : n == 4 ? WSize::kSz32
                                        : WSize::kSz64;
          op.value = ImmOperand{
              static_cast<uint64_t>(SignExtend(*raw, raw_sz)) & Mask(sz),
              false};
        }
        break;
      }
      case Tmpl::kRel8:
      case Tmpl::kRel32: {
        const size_t n = tmpl == Tmpl::kRel8 ? 1 : 4;
        auto raw = ReadLE(bytes, pos, n);
        if (!raw) return Fault(DecodeFaultKind::kTruncated, bytes.size());
        pos += n;
        op.value = RelOperand{static_cast<int32_t>(
            SignExtend(*raw, n == 1 ? WSize::kSz8 : WSize::kSz32))};
        break;
      }
    }
    instr.operand_storage[instr.num_operands++] = op;
  }

  instr.len = static_cast<uint8_t>(pos);
  return instr;
}

// Rendering.

std::string_view ConditionSuffix(uint8_t cond) {
  static constexpr std::array<std::string_view, 16> kNames = {
      "o", "no", "b", "ae", "e", "ne", "be", "a",
      "s", "ns", "p", "np", "l", "ge", "le", "g"};
  return kNames[cond & 15];
}

std::string MnemonicText(const Instr& instr) {
  switch (instr.mnemonic) {
    case Mnemonic::kMov:
      if (instr.sz == WSize::kSz64 && instr.opcode >= 0xB8 &&
          instr.opcode <= 0xBF) {
        return "movabs";
      }
      return "mov";
    case Mnemonic::kMovzx:
      return "movzx";
    case Mnemonic::kMovsx:
      return "movsx";
    case Mnemonic::kMovsxd:
      return "movsxd";
    case Mnemonic::kLea:
      return "lea";
    case Mnemonic::kAdd:
      return "add";
    case Mnemonic::kAdc:
      return "adc";
    case Mnemonic::kSub:
      return "sub";
    case Mnemonic::kSbb:
      return "sbb";
    case Mnemonic::kCmp:
      return "cmp";
    case Mnemonic::kAnd:
      return "and";
    case Mnemonic::kOr:
      return "or";
    case Mnemonic::kXor:
      return "xor";
    case Mnemonic::kTest:
      return "test";
    case Mnemonic::kNot:
      return "not";
    case Mnemonic::kNeg:
      return "neg";
    case Mnemonic::kInc:
      return "inc";
    case Mnemonic::kDec:
      return "dec";
    case Mnemonic::kMul:
      return "mul";
    case Mnemonic::kImul:
      return "imul";
    case Mnemonic::kDiv:
      return "div";
    case Mnemonic::kIdiv:
      return "idiv";
    case Mnemonic::kShl:
      return "shl";
    case Mnemonic::kShr:
      return "shr";
    case Mnemonic::kSar:
      return "sar";
    case Mnemonic::kPush:
      return "push";
    case Mnemonic::kPop:
      return "pop";
    case Mnemonic::kCall:
      return "call";
    case Mnemonic::kRet:
      return "ret";
    case Mnemonic::kJmp:
      return "jmp";
    case Mnemonic::kJcc:
      return fmt::format("j{}", ConditionSuffix(instr.cond));
    case Mnemonic::kSetcc:
      return fmt::format("set{}", ConditionSuffix(instr.cond));
    case Mnemonic::kCmovcc:
      return fmt::format("cmov{}", ConditionSuffix(instr.cond));
    case Mnemonic::kCdq:
      return instr.sz == WSize::kSz16   ? "cwd"
             : instr.sz == WSize::kSz32 ? "cdq"
                                        : "cqo";
    case Mnemonic::kXchg:
      return "xchg";
    case Mnemonic::kNop:
      return instr.opcode == 0x90 && instr.sz == WSize::kSz16 ? "xchg" : "nop";
    case Mnemonic::kSyscall:
      return "syscall";
  }
  return "?";
}

namespace {

std::string_view PtrKeyword(WSize sz) {
  switch (sz) {
    case WSize::kSz8:
      return "BYTE PTR ";
    case WSize::kSz16:
      return "WORD PTR ";
    case WSize::kSz32:
      return "DWORD PTR ";
    case WSize::kSz64:
      return "QWORD PTR ";
  }
  return "";
}

std::string MemText(const MemRef& mem, WSize sz, bool with_size) {
  std::string out(with_size ? PtrKeyword(sz) : "");
  if (!mem.base && !mem.index && !mem.rip_relative) {
    out += fmt::format("ds:{:#x}", static_cast<uint64_t>(int64_t{mem.disp}));
    return out;
  }
  out += '[';
  if (mem.rip_relative) {
    out += "rip";
  } else if (mem.base) {
    out += RegName(*mem.base, WSize::kSz64);
  }
  if (mem.index) {
    if (mem.base) out += '+';
    out += fmt::format("{}*{}", RegName(*mem.index, WSize::kSz64), mem.scale);
  }
  if (mem.disp_bytes > 0) {
    const int64_t d = mem.disp;
    out += d < 0 ? fmt::format("-{:#x}", static_cast<uint64_t>(-d))
                 : fmt::format("+{:#x}", static_cast<uint64_t>(d));
  }
  out += ']';
  return out;
}

}  // namespace

std::string OperandText(const Instr& instr, uint64_t addr) {
  if (instr.mnemonic == Mnemonic::kNop && instr.opcode == 0x90) {
    return instr.sz == WSize::kSz16 ? "ax,ax" : "";
  }
  std::string out;
  for (const Operand& op : instr.operands()) {
    if (!out.empty()) out += ',';
    if (op.is_reg()) {
      out += RegName(op.reg(), op.sz);
    } else if (op.is_mem()) {
      out += MemText(op.mem(), op.sz, instr.mnemonic != Mnemonic::kLea);
    } else if (op.is_imm()) {
      const auto& imm = std::get<ImmOperand>(op.value);
      out +=
          imm.implicit_one ? std::string("1") : fmt::format("{:#x}", imm.value);
    } else {
      const uint64_t target = addr + instr.len + static_cast<int64_t>(op.rel());
      out += fmt::format("{:#x}", target);
    }
  }
  return out;
}

std::string FormatInstr(const Instr& instr, uint64_t addr) {
  std::string ops = OperandText(instr, addr);
  std::string mnem = MnemonicText(instr);
  return ops.empty() ? mnem : mnem + " " + ops;
}

}  // namespace runsem
