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

#ifndef RUNSEM_DECODER_H_
#define RUNSEM_DECODER_H_

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "runsem/machine.h"
#include "runsem/result.h"

namespace runsem {

// The supported integer subset. Condition-code families (Jcc, SETcc, CMOVcc)
// carry their condition in Instr::cond.
enum class Mnemonic : uint8_t {
  kMov,
  kMovzx,
  kMovsx,
  kMovsxd,
  kLea,
  kAdd,
  kAdc,
  kSub,
  kSbb,
  kCmp,
  kAnd,
  kOr,
  kXor,
  kTest,
  kNot,
  kNeg,
  kInc,
  kDec,
  kMul,
  kImul,
  kDiv,
  kIdiv,
  kShl,
  kShr,
  kSar,
  kPush,
  kPop,
  kCall,
  kRet,
  kJmp,
  kJcc,
  kSetcc,
  kCmovcc,
  kCdq,  // cwd / cdq / cqo depending on size
  kXchg,
  kNop,
  kSyscall,
};

struct RegOperand {
  uint8_t reg = 0;
  friend bool operator==(const RegOperand&, const RegOperand&) = default;
};

// Memory form of a ModRM operand. rip_relative excludes base and index.
struct MemRef {
  std::optional<uint8_t> base;
  std::optional<uint8_t> index;  // never RSP
  uint8_t scale = 1;             // 1, 2, 4 or 8
  int32_t disp = 0;
  bool rip_relative = false;
  // Encoded displacement width (0, 1 or 4 bytes); only affects rendering.
  uint8_t disp_bytes = 0;
  friend bool operator==(const MemRef&, const MemRef&) = default;
};

// The r/m half of a ModRM byte: a register or a memory reference.
using RMForm = std::variant<RegOperand, MemRef>;

struct ImmOperand {
  uint64_t value = 0;  // already extended and masked to the operand width
  bool implicit_one = false;  // the "1" of the D0/D1 shift forms
  friend bool operator==(const ImmOperand&, const ImmOperand&) = default;
};

struct RelOperand {
  int32_t disp = 0;
  friend bool operator==(const RelOperand&, const RelOperand&) = default;
};

struct Operand {
  std::variant<RegOperand, MemRef, ImmOperand, RelOperand> value;
  WSize sz = WSize::kSz64;

  bool is_reg() const { return std::holds_alternative<RegOperand>(value); }
  bool is_mem() const { return std::holds_alternative<MemRef>(value); }
  bool is_imm() const { return std::holds_alternative<ImmOperand>(value); }
  bool is_rel() const { return std::holds_alternative<RelOperand>(value); }
  uint8_t reg() const { return std::get<RegOperand>(value).reg; }
  const MemRef& mem() const { return std::get<MemRef>(value); }
  uint64_t imm() const { return std::get<ImmOperand>(value).value; }
  int32_t rel() const { return std::get<RelOperand>(value).disp; }

  friend bool operator==(const Operand&, const Operand&) = default;
};

inline constexpr size_t kMaxOperands = 3;

// A decoded instruction. Operands are in Intel order, destination first.
struct Instr {
  Mnemonic mnemonic = Mnemonic::kNop;
  WSize sz = WSize::kSz64;
  uint8_t cond = 0;  // Jcc / SETcc / CMOVcc condition code
  uint8_t len = 0;   // bytes consumed
  // Opcode byte; 0x0Fxx for the two-byte map.
  uint16_t opcode = 0;
  uint8_t num_operands = 0;
  std::array<Operand, kMaxOperands> operand_storage{};

  std::span<const Operand> operands() const {
    return {operand_storage.data(), num_operands};
  }
  const Operand& op(size_t i) const { return operand_storage[i]; }

  friend bool operator==(const Instr&, const Instr&) = default;
};

enum class DecodeFaultKind : uint8_t {
  kUnknownOpcode,
  kUnsupportedForm,
  kTruncated
};

struct DecodeFault {
  DecodeFaultKind kind = DecodeFaultKind::kUnknownOpcode;
  uint8_t offset = 0;  // byte offset where decoding gave up
  friend bool operator==(const DecodeFault&, const DecodeFault&) = default;
};

std::string Describe(const DecodeFault& fault);

struct Rex {
  bool w = false;
  bool r = false;
  bool x = false;
  bool b = false;
  static Rex FromByte(uint8_t byte) {
    return {(byte & 8) != 0, (byte & 4) != 0, (byte & 2) != 0, (byte & 1) != 0};
  }
  friend bool operator==(const Rex&, const Rex&) = default;
};

struct Prefixes {
  std::optional<Rex> rex;
  bool operand_size_override = false;
  uint8_t consumed = 0;
  friend bool operator==(const Prefixes&, const Prefixes&) = default;
};

// Recognizes the 0x66 operand-size prefix and a REX byte, which must come
// last. Every other legacy prefix is rejected as unsupported.
Result<Prefixes, DecodeFault> DecodePrefixes(std::span<const uint8_t> bytes);

struct ModRM {
  uint8_t reg_field = 0;  // REX.R-extended
  uint8_t mod = 0;
  RMForm rm;
  uint8_t consumed = 0;  // ModRM + SIB + displacement
  friend bool operator==(const ModRM&, const ModRM&) = default;
};

// Decodes ModRM (and any SIB byte and displacement) starting at bytes[0].
Result<ModRM, DecodeFault> DecodeModRM(std::span<const uint8_t> bytes,
                                       std::optional<Rex> rex);

// Decodes one instruction from the front of `bytes`.
Result<Instr, DecodeFault> DecodeInstr(std::span<const uint8_t> bytes);

// Rendering in objdump's Intel syntax. `addr` is the address of the
// instruction; branch targets are printed absolute.
std::string MnemonicText(const Instr& instr);
std::string OperandText(const Instr& instr, uint64_t addr);
std::string FormatInstr(const Instr& instr, uint64_t addr);

std::string_view ConditionSuffix(uint8_t cond);

}  // namespace runsem

#endif  // RUNSEM_DECODER_H_
