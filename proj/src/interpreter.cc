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

#include "runsem/interpreter.h"

#include <array>
#include <cassert>

#include "fmt/format.h"

namespace runsem {
namespace {

using u128 = unsigned __int128;
using i128 = __int128;

FlagSet ResultFlags(uint64_t result, WSize sz) {
  FlagSet f;
  f.zf = result == 0;
  f.sf = (result & SignBit(sz)) != 0;
  return f;
}

StepOutcome Faulted(const Config& k, FaultInfo::Cause cause) {
  StepOutcome out;
  out.kind = StepOutcome::Kind::kFault;
  out.fault = FaultInfo{k.rip, std::move(cause)};
  return out;
}

// Runs the semantic action of one instruction. Every memory read happens
// before any state change, and at most one memory store is performed, before
// any register update, so a fault leaves `k` untouched.
class Executor {
 public:
  Executor(Config& k, const Instr& instr) : k_(k), instr_(instr) {}

  std::optional<FaultInfo::Cause> Run();

 private:
  EA Locate(const Operand& op) const {
    if (op.is_reg()) return EA::Register(op.reg());
    return ResolveEA(k_, op.mem());
  }
  Result<uint64_t, MemFault> Load(const Operand& op) const {
    if (op.is_imm()) return op.imm();
    return ReadOperand(k_, op.sz, Locate(op));
  }
  Status<MemFault> Store(const Operand& op, uint64_t v) {
    return WriteOperand(k_, op.sz, Locate(op), v & Mask(op.sz));
  }

  std::optional<FaultInfo::Cause> Push(uint64_t v) {
    const uint64_t rsp = k_.regs[kRsp] - 8;
    if (auto st = WriteOperand(k_, WSize::kSz64, EA::Memory(rsp), v); !st) {
      return st.error();
    }
    k_.regs[kRsp] = rsp;
    return std::nullopt;
  }

  std::optional<FaultInfo::Cause> Alu(ArithKind kind, bool write_back);
  std::optional<FaultInfo::Cause> IncDec(ArithKind kind);
  std::optional<FaultInfo::Cause> WideMul();
  std::optional<FaultInfo::Cause> Imul();
  std::optional<FaultInfo::Cause> Divide(bool is_signed);
  std::optional<FaultInfo::Cause> Shift();
  std::optional<FaultInfo::Cause> Pop();

  Config& k_;
  const Instr& instr_;
};

#define RUNSEM_LOAD_OR_RETURN(var, expr)          \
  auto var##_result = (expr);                     \
  if (!var##_result) return var##_result.error(); \
  const uint64_t var = *var##_result

#define RUNSEM_STORE_OR_RETURN(expr) \
  do {                               \
    auto st_ = (expr);               \
    if (!st_) return st_.error();    \
  } while (0)

std::optional<FaultInfo::Cause> Executor::Alu(ArithKind kind, bool write_back) {
  const Operand& dst = instr_.op(0);
  RUNSEM_LOAD_OR_RETURN(a, Load(dst));
  RUNSEM_LOAD_OR_RETURN(b, Load(instr_.op(1)));
  const ArithResult r = FlagsArith(kind, instr_.sz, a, b, k_.flags.cf);
  if (write_back) RUNSEM_STORE_OR_RETURN(Store(dst, r.result));
  k_.flags = r.flags;
  return std::nullopt;
}

std::optional<FaultInfo::Cause> Executor::IncDec(ArithKind kind) {
  const Operand& dst = instr_.op(0);
  RUNSEM_LOAD_OR_RETURN(a, Load(dst));
  ArithResult r = FlagsArith(kind, instr_.sz, a, 1, false);
  RUNSEM_STORE_OR_RETURN(Store(dst, r.result));
  r.flags.cf = k_.flags.cf;
  k_.flags = r.flags;
  return std::nullopt;
}

// One-operand MUL and IMUL: RAX times the operand into RDX:RAX (AX for bytes).
std::optional<FaultInfo::Cause> Executor::WideMul() {
  const WSize sz = instr_.sz;
  const unsigned n = Bits(sz);
  RUNSEM_LOAD_OR_RETURN(src, Load(instr_.op(0)));
  const uint64_t acc = ReadReg(k_, sz, kRax);

  WideSplit split;
  bool overflow = false;
  if (instr_.mnemonic == Mnemonic::kMul) {
    const u128 res = static_cast<u128>(acc) * src;
    split = SplitWide(res, n);
    overflow = split.hi != 0;
  } else {
    const i128 res =
        static_cast<i128>(SignExtend(acc, sz)) * SignExtend(src, sz);
    split = SplitWide(static_cast<u128>(res) &
                          ((static_cast<u128>(Mask(sz)) << n) | Mask(sz)),
                      n);
    overflow = res != SignExtend(split.lo, sz);
  }

  if (n == 8) {
    WriteReg(k_, WSize::kSz16, kRax, split.lo | (split.hi << 8));
  } else {
    WriteReg(k_, sz, kRax, split.lo);
    WriteReg(k_, sz, kRdx, split.hi);
  }
  // SF and ZF are architecturally undefined here; they follow the low half.
  FlagSet f = ResultFlags(split.lo, sz);
  f.cf = f.of = overflow;
  k_.flags = f;
  return std::nullopt;
}

// Two- and three-operand IMUL: truncated signed product into a register.
std::optional<FaultInfo::Cause> Executor::Imul() {
  const WSize sz = instr_.sz;
  const Operand& dst = instr_.op(0);
  uint64_t x = 0;
  uint64_t y = 0;
  if (instr_.num_operands == 2) {
    RUNSEM_LOAD_OR_RETURN(a, Load(dst));
    RUNSEM_LOAD_OR_RETURN(b, Load(instr_.op(1)));
    x = a;
    y = b;
  } else {
    RUNSEM_LOAD_OR_RETURN(a, Load(instr_.op(1)));
    RUNSEM_LOAD_OR_RETURN(b, Load(instr_.op(2)));
    x = a;
    y = b;
  }
  const i128 res = static_cast<i128>(SignExtend(x, sz)) * SignExtend(y, sz);
  const uint64_t lo = static_cast<uint64_t>(res) & Mask(sz);
  WriteReg(k_, sz, dst.reg(), lo);
  FlagSet f = ResultFlags(lo, sz);
  f.cf = f.of = res != SignExtend(lo, sz);
  k_.flags = f;
  return std::nullopt;
}

std::optional<FaultInfo::Cause> Executor::Divide(bool is_signed) {
  const WSize sz = instr_.sz;
  const unsigned n = Bits(sz);
  RUNSEM_LOAD_OR_RETURN(divisor, Load(instr_.op(0)));
  if (divisor == 0) return DivideError{};

  uint64_t quotient = 0;
  uint64_t remainder = 0;
  if (!is_signed) {
    const u128 dividend =
        n == 8 ? ReadReg(k_, WSize::kSz16, kRax)
               : (static_cast<u128>(ReadReg(k_, sz, kRdx)) << n) |
                     ReadReg(k_, sz, kRax);
    const u128 q = dividend / divisor;
    if (q > Mask(sz)) return DivideError{};
    quotient = static_cast<uint64_t>(q);
    remainder = static_cast<uint64_t>(dividend % divisor);
  } else {
    i128 dividend;
    if (n == 8) {
      dividend = SignExtend(ReadReg(k_, WSize::kSz16, kRax), WSize::kSz16);
    } else {
      dividend = static_cast<i128>((static_cast<u128>(static_cast<uint64_t>(
                                        SignExtend(ReadReg(k_, sz, kRdx), sz)))
                                    << n) |
                                   ReadReg(k_, sz, kRax));
      if (n < 64) {
        // Sign-extend the 2n-bit dividend to 128 bits.
        const unsigned shift = 128 - 2 * n;
        dividend =
            static_cast<i128>(static_cast<u128>(dividend) << shift) >> shift;
      }
    }
    const i128 d = SignExtend(divisor, sz);
    const i128 kMin128 = static_cast<i128>(static_cast<u128>(1) << 127);
    if (d == -1 && dividend == kMin128) return DivideError{};
    const i128 q = dividend / d;
    const i128 lo_limit = -static_cast<i128>(SignBit(sz));
    const i128 hi_limit = static_cast<i128>(SignBit(sz)) - 1;
    if (q < lo_limit || q > hi_limit) return DivideError{};
    quotient = static_cast<uint64_t>(q) & Mask(sz);
    remainder = static_cast<uint64_t>(dividend % d) & Mask(sz);
  }

  if (n == 8) {
    WriteReg(k_, WSize::kSz16, kRax, quotient | (remainder << 8));
  } else {
    WriteReg(k_, sz, kRax, quotient);
    WriteReg(k_, sz, kRdx, remainder);
  }
  return std::nullopt;
}

std::optional<FaultInfo::Cause> Executor::Shift() {
  const WSize sz = instr_.sz;
  const unsigned n = Bits(sz);
  const Operand& dst = instr_.op(0);
  RUNSEM_LOAD_OR_RETURN(a, Load(dst));
  RUNSEM_LOAD_OR_RETURN(raw_count, Load(instr_.op(1)));
  const unsigned count =
      static_cast<unsigned>(raw_count & (sz == WSize::kSz64 ? 63 : 31));
  if (count == 0) {
    // Flags are untouched; the write still zero-extends 32-bit registers.
    RUNSEM_STORE_OR_RETURN(Store(dst, a));
    return std::nullopt;
  }

  uint64_t res = 0;
  bool cf = false;
  bool of = false;
  switch (instr_.mnemonic) {
    case Mnemonic::kShl:
      res = static_cast<uint64_t>(static_cast<u128>(a) << count) & Mask(sz);
      cf = count <= n && ((a >> (n - count)) & 1) != 0;
      of = ((res & SignBit(sz)) != 0) != cf;
      break;
    case Mnemonic::kShr:
      res = a >> count;
      cf = count <= n && ((a >> (count - 1)) & 1) != 0;
      of = (a & SignBit(sz)) != 0;
      break;
    case Mnemonic::kSar: {
      const int64_t sa = SignExtend(a, sz);
      res = static_cast<uint64_t>(sa >> count) & Mask(sz);
      cf = ((sa >> (count - 1)) & 1) != 0;
      of = false;
      break;
    }
    default:
      assert(false);
  }
  RUNSEM_STORE_OR_RETURN(Store(dst, res));
  FlagSet f = ResultFlags(res, sz);
  f.cf = cf;
  f.of = of;
  k_.flags = f;
  return std::nullopt;
}

std::optional<FaultInfo::Cause> Executor::Pop() {
  const uint64_t rsp = k_.regs[kRsp];
  RUNSEM_LOAD_OR_RETURN(v, ReadOperand(k_, WSize::kSz64, EA::Memory(rsp)));
  const Operand& dst = instr_.op(0);
  if (dst.is_reg()) {
    k_.regs[kRsp] = rsp + 8;
    WriteReg(k_, WSize::kSz64, dst.reg(), v);
    return std::nullopt;
  }
  // A memory destination is addressed with the incremented RSP.
  k_.regs[kRsp] = rsp + 8;
  auto st = Store(dst, v);
  if (!st) {
    k_.regs[kRsp] = rsp;
    return st.error();
  }
  return std::nullopt;
}

std::optional<FaultInfo::Cause> Executor::Run() {
  const WSize sz = instr_.sz;
  switch (instr_.mnemonic) {
    case Mnemonic::kMov:
    case Mnemonic::kMovzx: {
      RUNSEM_LOAD_OR_RETURN(v, Load(instr_.op(1)));
      RUNSEM_STORE_OR_RETURN(Store(instr_.op(0), v));
      return std::nullopt;
    }
    case Mnemonic::kMovsx:
    case Mnemonic::kMovsxd: {
      const Operand& src = instr_.op(1);
      RUNSEM_LOAD_OR_RETURN(v, Load(src));
      RUNSEM_STORE_OR_RETURN(
          Store(instr_.op(0), static_cast<uint64_t>(SignExtend(v, src.sz))));
      return std::nullopt;
    }
    case Mnemonic::kLea:
      WriteReg(k_, sz, instr_.op(0).reg(),
               ResolveEA(k_, instr_.op(1).mem()).addr & Mask(sz));
      return std::nullopt;

    case Mnemonic::kAdd:
      return Alu(ArithKind::kAdd, true);
    case Mnemonic::kAdc:
      return Alu(ArithKind::kAdc, true);
    case Mnemonic::kSub:
      return Alu(ArithKind::kSub, true);
    case Mnemonic::kSbb:
      return Alu(ArithKind::kSbb, true);
    case Mnemonic::kCmp:
      return Alu(ArithKind::kSub, false);
    case Mnemonic::kAnd:
      return Alu(ArithKind::kAnd, true);
    case Mnemonic::kOr:
      return Alu(ArithKind::kOr, true);
    case Mnemonic::kXor:
      return Alu(ArithKind::kXor, true);
    case Mnemonic::kTest:
      return Alu(ArithKind::kAnd, false);

    case Mnemonic::kNot: {
      RUNSEM_LOAD_OR_RETURN(a, Load(instr_.op(0)));
      RUNSEM_STORE_OR_RETURN(Store(instr_.op(0), ~a));
      return std::nullopt;
    }
    case Mnemonic::kNeg: {
      RUNSEM_LOAD_OR_RETURN(a, Load(instr_.op(0)));
      const ArithResult r = FlagsArith(ArithKind::kNeg, sz, a, 0, false);
      RUNSEM_STORE_OR_RETURN(Store(instr_.op(0), r.result));
      k_.flags = r.flags;
      return std::nullopt;
    }
    case Mnemonic::kInc:
      return IncDec(ArithKind::kAdd);
    case Mnemonic::kDec:
      return IncDec(ArithKind::kSub);

    case Mnemonic::kMul:
      return WideMul();
    case Mnemonic::kImul:
      return instr_.num_operands == 1 ? WideMul() : Imul();
    case Mnemonic::kDiv:
      return Divide(false);
    case Mnemonic::kIdiv:
      return Divide(true);

    case Mnemonic::kShl:
    case Mnemonic::kShr:
    case Mnemonic::kSar:
      return Shift();

    case Mnemonic::kPush: {
      RUNSEM_LOAD_OR_RETURN(v, Load(instr_.op(0)));
      return Push(v);
    }
    case Mnemonic::kPop:
      return Pop();

    case Mnemonic::kCall: {
      const Operand& target_op = instr_.op(0);
      uint64_t target = 0;
      if (target_op.is_rel()) {
        target = k_.rip + static_cast<int64_t>(target_op.rel());
      } else {
        RUNSEM_LOAD_OR_RETURN(t, Load(target_op));
        target = t;
      }
      if (auto fault = Push(k_.rip)) return fault;
      k_.rip = target;
      return std::nullopt;
    }
    case Mnemonic::kRet: {
      const uint64_t rsp = k_.regs[kRsp];
      RUNSEM_LOAD_OR_RETURN(target,
                            ReadOperand(k_, WSize::kSz64, EA::Memory(rsp)));
      k_.regs[kRsp] = rsp + 8;
      k_.rip = target;
      return std::nullopt;
    }
    case Mnemonic::kJmp: {
      const Operand& target_op = instr_.op(0);
      if (target_op.is_rel()) {
        k_.rip += static_cast<int64_t>(target_op.rel());
      } else {
        RUNSEM_LOAD_OR_RETURN(t, Load(target_op));
        k_.rip = t;
      }
      return std::nullopt;
    }
    case Mnemonic::kJcc: {
      const auto taken = EvalCond(k_.flags, instr_.cond);
      if (!taken) return UnsupportedCondition{instr_.cond};
      if (*taken) k_.rip += static_cast<int64_t>(instr_.op(0).rel());
      return std::nullopt;
    }
    case Mnemonic::kSetcc: {
      const auto c = EvalCond(k_.flags, instr_.cond);
      if (!c) return UnsupportedCondition{instr_.cond};
      RUNSEM_STORE_OR_RETURN(Store(instr_.op(0), *c ? 1 : 0));
      return std::nullopt;
    }
    case Mnemonic::kCmovcc: {
      const auto c = EvalCond(k_.flags, instr_.cond);
      if (!c) return UnsupportedCondition{instr_.cond};
      const Operand& dst = instr_.op(0);
      RUNSEM_LOAD_OR_RETURN(v, Load(instr_.op(1)));
      // A 32-bit destination is zero-extended even when the move is skipped.
      WriteReg(k_, sz, dst.reg(), *c ? v : ReadReg(k_, sz, dst.reg()));
      return std::nullopt;
    }
    case Mnemonic::kCdq: {
      const bool negative = (ReadReg(k_, sz, kRax) & SignBit(sz)) != 0;
      WriteReg(k_, sz, kRdx, negative ? Mask(sz) : 0);
      return std::nullopt;
    }
    case Mnemonic::kXchg: {
      // Any memory operand is operand 0, so the single store happens first.
      const Operand& a_op = instr_.op(0);
      const Operand& b_op = instr_.op(1);
      RUNSEM_LOAD_OR_RETURN(a, Load(a_op));
      RUNSEM_LOAD_OR_RETURN(b, Load(b_op));
      RUNSEM_STORE_OR_RETURN(Store(a_op, b));
      RUNSEM_STORE_OR_RETURN(Store(b_op, a));
      return std::nullopt;
    }
    case Mnemonic::kNop:
      return std::nullopt;
    case Mnemonic::kSyscall:
      // Handled by ExecInstr.
      return std::nullopt;
  }
  return std::nullopt;
}

#undef RUNSEM_LOAD_OR_RETURN
#undef RUNSEM_STORE_OR_RETURN

}  // namespace

std::string_view FaultKindName(FaultKind kind) {
  switch (kind) {
    case FaultKind::kMemory:
      return "memory";
    case FaultKind::kDecode:
      return "decode";
    case FaultKind::kDivideError:
      return "divide";
    case FaultKind::kUnsupportedCondition:
      return "condition";
    case FaultKind::kUnknownSyscall:
      return "syscall";
  }
  return "?";
}

std::string Describe(const FaultInfo& fault) {
  struct Visitor {
    std::string operator()(const MemFault& f) const { return Describe(f); }
    std::string operator()(const DecodeFault& f) const { return Describe(f); }
    std::string operator()(const DivideError&) const { return "divide error"; }
    std::string operator()(const UnsupportedCondition& f) const {
      return fmt::format("unsupported condition code {}", f.cond);
    }
    std::string operator()(const UnknownSyscall& f) const {
      return fmt::format("unknown syscall {}", f.number);
    }
  };
  return fmt::format("{} at rip {:#x}", std::visit(Visitor{}, fault.cause),
                     fault.rip);
}

EA ResolveEA(const Config& k, const RMForm& rm) {
  if (const auto* reg = std::get_if<RegOperand>(&rm)) {
    return EA::Register(reg->reg);
  }
  const MemRef& mem = std::get<MemRef>(rm);
  uint64_t addr = static_cast<uint64_t>(static_cast<int64_t>(mem.disp));
  if (mem.rip_relative) addr += k.rip;
  if (mem.base) addr += k.regs[*mem.base];
  if (mem.index) addr += k.regs[*mem.index] * mem.scale;
  return EA::Memory(addr);
}

Result<uint64_t, MemFault> ReadOperand(const Config& k, WSize sz, EA ea) {
  if (ea.kind == EA::Kind::kRegister) return ReadReg(k, sz, ea.reg);
  std::array<uint8_t, 8> buf{};
  auto st = k.mem.ReadInto(ea.addr, std::span(buf).first(Bytes(sz)));
  if (!st) return st.error();
  uint64_t v = 0;
  for (unsigned i = 0; i < Bytes(sz); ++i) v |= uint64_t{buf[i]} << (8 * i);
  return v;
}

Status<MemFault> WriteOperand(Config& k, WSize sz, EA ea, uint64_t v) {
  if (ea.kind == EA::Kind::kRegister) {
    WriteReg(k, sz, ea.reg, v);
    return {};
  }
  std::array<uint8_t, 8> buf{};
  for (unsigned i = 0; i < Bytes(sz); ++i) {
    buf[i] = static_cast<uint8_t>(v >> (8 * i));
  }
  return k.mem.WriteBytes(ea.addr, std::span(buf).first(Bytes(sz)));
}

ArithResult FlagsArith(ArithKind kind, WSize sz, uint64_t a, uint64_t b,
                       bool carry_in) {
  assert((a & ~Mask(sz)) == 0 && (b & ~Mask(sz)) == 0);
  const uint64_t mask = Mask(sz);
  const uint64_t sign = SignBit(sz);
  ArithResult r;
  switch (kind) {
    case ArithKind::kAdd:
    case ArithKind::kAdc: {
      const u128 cin = kind == ArithKind::kAdc && carry_in ? 1 : 0;
      const u128 wide = static_cast<u128>(a) + b + cin;
      r.result = static_cast<uint64_t>(wide) & mask;
      r.flags = ResultFlags(r.result, sz);
      r.flags.cf = wide > mask;
      r.flags.of = ((a ^ r.result) & (b ^ r.result) & sign) != 0;
      break;
    }
    case ArithKind::kSub:
    case ArithKind::kSbb: {
      const u128 bin = kind == ArithKind::kSbb && carry_in ? 1 : 0;
      const u128 subtrahend = static_cast<u128>(b) + bin;
      r.result =
          static_cast<uint64_t>(static_cast<u128>(a) - subtrahend) & mask;
      r.flags = ResultFlags(r.result, sz);
      r.flags.cf = static_cast<u128>(a) < subtrahend;
      r.flags.of = ((a ^ b) & (a ^ r.result) & sign) != 0;
      break;
    }
    case ArithKind::kAnd:
    case ArithKind::kOr:
    case ArithKind::kXor:
      r.result = kind == ArithKind::kAnd  ? (a & b)
                 : kind == ArithKind::kOr ? (a | b)
                                          : (a ^ b);
      r.flags = ResultFlags(r.result, sz);
      break;
    case ArithKind::kNeg:
      r.result = (0 - a) & mask;
      r.flags = ResultFlags(r.result, sz);
      r.flags.cf = a != 0;
      r.flags.of = a == sign;
      break;
  }
  return r;
}

std::optional<bool> EvalCond(const FlagSet& f, uint8_t cc) {
  assert(cc < 16);
  bool base = false;
  switch (cc >> 1) {
    case 0:
      base = f.of;
      break;
    case 1:
      base = f.cf;
      break;
    case 2:
      base = f.zf;
      break;
    case 3:
      base = f.cf || f.zf;
      break;
    case 4:
      base = f.sf;
      break;
    case 5:
      return std::nullopt;
    case 6:
      base = f.sf != f.of;
      break;
    case 7:
      base = f.zf || (f.sf != f.of);
      break;
  }
  // Odd condition codes are the negations of their even neighbours.
  return (cc & 1) ? !base : base;
}

StepOutcome ExecInstr(Config& k, const Instr& instr) {
  StepOutcome out;
  out.instr = instr;
  if (instr.mnemonic == Mnemonic::kSyscall) {
    out.kind = StepOutcome::Kind::kSyscall;
    return out;
  }
  const uint64_t instr_rip = k.rip - instr.len;
  if (auto cause = Executor(k, instr).Run()) {
    out.kind = StepOutcome::Kind::kFault;
    out.fault = FaultInfo{instr_rip, std::move(*cause)};
    return out;
  }
  out.kind = StepOutcome::Kind::kNext;
  return out;
}

StepOutcome StepCore(Config& k) {
  const uint64_t rip = k.rip;
  FetchWindow window = k.mem.FetchPrefix(rip, Mem::kMaxFetch);
  if (window.bytes.empty()) return Faulted(k, *window.fault);

  auto decoded = DecodeInstr(window.bytes);
  if (!decoded) {
    // Running out of fetchable bytes mid-instruction is a fetch fault.
    if (decoded.error().kind == DecodeFaultKind::kTruncated && window.fault) {
      return Faulted(k, *window.fault);
    }
    return Faulted(k, decoded.error());
  }

  k.rip = rip + decoded->len;
  StepOutcome out = ExecInstr(k, *decoded);
  if (out.kind == StepOutcome::Kind::kFault) k.rip = rip;
  return out;
}

}  // namespace runsem
