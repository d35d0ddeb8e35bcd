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

#ifndef RUNSEM_INTERPRETER_H_
#define RUNSEM_INTERPRETER_H_

#include <cstdint>
#include <optional>
#include <string>
#include <variant>

#include "runsem/decoder.h"
#include "runsem/machine.h"
#include "runsem/memory.h"
#include "runsem/result.h"

namespace runsem {

// A resolved operand location: a register or a virtual address.
struct EA {
  enum class Kind : uint8_t { kRegister, kMemory };
  Kind kind = Kind::kRegister;
  uint8_t reg = 0;
  uint64_t addr = 0;

  static EA Register(uint8_t r) { return {Kind::kRegister, r, 0}; }
  static EA Memory(uint64_t a) { return {Kind::kMemory, 0, a}; }
  friend bool operator==(const EA&, const EA&) = default;
};

struct DivideError {
  friend bool operator==(const DivideError&, const DivideError&) = default;
};
struct UnsupportedCondition {
  uint8_t cond = 0;
  friend bool operator==(const UnsupportedCondition&,
                         const UnsupportedCondition&) = default;
};
struct UnknownSyscall {
  uint64_t number = 0;
  friend bool operator==(const UnknownSyscall&,
                         const UnknownSyscall&) = default;
};

enum class FaultKind : uint8_t {
  kMemory,
  kDecode,
  kDivideError,
  kUnsupportedCondition,
  kUnknownSyscall,
};

// Why a configuration has no successor. `rip` is the address of the
// instruction that could not complete.
struct FaultInfo {
  using Cause = std::variant<MemFault, DecodeFault, DivideError,
                             UnsupportedCondition, UnknownSyscall>;
  uint64_t rip = 0;
  Cause cause;

  FaultKind kind() const { return static_cast<FaultKind>(cause.index()); }
  friend bool operator==(const FaultInfo&, const FaultInfo&) = default;
};

std::string Describe(const FaultInfo& fault);
std::string_view FaultKindName(FaultKind kind);

// Outcome of one step. For kNext and kSyscall the Config has been updated in
// place (kSyscall leaves RIP after the syscall instruction). For kFault the
// Config is exactly what it was before the step.
struct StepOutcome {
  enum class Kind : uint8_t { kNext, kSyscall, kFault };
  Kind kind = Kind::kNext;
  std::optional<Instr> instr;  // present whenever decoding succeeded
  std::optional<FaultInfo> fault;
};

// Effective address of an r/m operand. Address arithmetic wraps mod 2^64;
// RIP-relative forms use k.rip, which the caller has already advanced past
// the instruction.
EA ResolveEA(const Config& k, const RMForm& rm);

// Little-endian sized load/store through a resolved location.
Result<uint64_t, MemFault> ReadOperand(const Config& k, WSize sz, EA ea);
Status<MemFault> WriteOperand(Config& k, WSize sz, EA ea, uint64_t v);

enum class ArithKind : uint8_t {
  kAdd,
  kAdc,
  kSub,
  kSbb,
  kAnd,
  kOr,
  kXor,
  kNeg
};

struct ArithResult {
  uint64_t result = 0;
  FlagSet flags;
  friend bool operator==(const ArithResult&, const ArithResult&) = default;
};

// Result and CF/ZF/SF/OF of a two's-complement ALU operation at width sz.
// carry_in is only consulted by kAdc and kSbb; kNeg negates `a` and ignores
// `b`. Operands must fit in Bits(sz).
ArithResult FlagsArith(ArithKind kind, WSize sz, uint64_t a, uint64_t b,
                       bool carry_in);

// Standard x86 condition table over the tracked flags. Parity conditions
// (10 and 11) are outside the model and yield nullopt.
std::optional<bool> EvalCond(const FlagSet& f, uint8_t cc);

// Executes a decoded instruction. k.rip must already point past `instr`.
// On fault the Config is left unchanged.
StepOutcome ExecInstr(Config& k, const Instr& instr);

// Fetches, decodes and executes the instruction at k.rip.
StepOutcome StepCore(Config& k);

}  // namespace runsem

#endif  // RUNSEM_INTERPRETER_H_
