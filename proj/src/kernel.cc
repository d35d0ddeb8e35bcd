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

#include "runsem/kernel.h"

#include <algorithm>
#include <cassert>
#include <limits>

namespace runsem {
namespace {

constexpr uint64_t kSyscallLen = 2;  // 0F 05

KernelStep FaultStep(KernelStep step, FaultInfo fault) {
  step.status = KernelStep::Status::kFaulted;
  step.fault = std::move(fault);
  return step;
}

}  // namespace

std::string_view SyscallName(uint64_t number) {
  switch (number) {
    case abi::kSysRead:
      return "read";
    case abi::kSysWrite:
      return "write";
    case abi::kSysMmap:
      return "mmap";
    case abi::kSysExit:
      return "exit";
    case abi::kSysExitGroup:
      return "exit_group";
    default:
      return "unknown";
  }
}

Result<uint64_t, MemFault> SysRead(KernelState& ks, uint64_t fd, uint64_t buf,
                                   uint64_t count) {
  if (fd != 0) return abi::Errno(abi::kEBADF);
  const auto remaining = ks.stdin_remaining();
  const uint64_t m = std::min<uint64_t>(count, remaining.size());
  if (m == 0) return uint64_t{0};
  if (auto st = ks.config.mem.WriteBytes(buf, remaining.first(m)); !st) {
    return st.error();
  }
  ks.stdin_consumed += m;
  return m;
}

Result<uint64_t, MemFault> SysWrite(KernelState& ks, uint64_t fd, uint64_t buf,
                                    uint64_t count) {
  if (fd != 1 && fd != 2) return abi::Errno(abi::kEBADF);
  if (count == 0) return uint64_t{0};
  auto bytes = ks.config.mem.ReadBytes(buf, count);
  if (!bytes) return bytes.error();
  ks.stdout_written.insert(ks.stdout_written.end(), bytes->begin(),
                           bytes->end());
  return count;
}

uint64_t SysMmap(KernelState& ks, uint64_t addr, uint64_t len, uint64_t prot,
                 uint64_t flags, uint64_t /*fd*/, uint64_t /*off*/) {
  constexpr uint64_t kPage = Mem::kPageSize;
  if (len == 0) return abi::Errno(abi::kEINVAL);
  if ((flags & abi::kMapAnonymous) == 0 ||
      (flags & (abi::kMapShared | abi::kMapPrivate)) != abi::kMapPrivate) {
    return abi::Errno(abi::kEINVAL);
  }
  if ((prot & ~uint64_t{7}) != 0) return abi::Errno(abi::kEINVAL);
  if (len > std::numeric_limits<uint64_t>::max() - (kPage - 1)) {
    return abi::Errno(abi::kENOMEM);
  }
  const uint64_t rounded = (len + kPage - 1) & ~(kPage - 1);

  const bool fixed = (flags & abi::kMapFixed) != 0;
  if (fixed && (addr & (kPage - 1)) != 0) return abi::Errno(abi::kEINVAL);
  const uint64_t base = fixed ? addr : ks.mmap_cursor;
  if (base > std::numeric_limits<uint64_t>::max() - rounded) {
    return abi::Errno(abi::kENOMEM);
  }
  auto st = ks.config.mem.MapRegion(base, {}, rounded,
                                    Prot::FromBits(static_cast<uint8_t>(prot)));
  if (!st) return abi::Errno(abi::kENOMEM);
  // Keep later cursor allocations clear of anything mapped at or above it.
  ks.mmap_cursor = std::max(ks.mmap_cursor, base + rounded);
  return base;
}

KernelStep DispatchSyscall(KernelState& ks) {
  Config& k = ks.config;
  KernelStep step;
  step.rip = k.rip - kSyscallLen;

  SyscallEvent ev;
  ev.number = k.regs[kRax];
  ev.args = {k.regs[kRdi], k.regs[kRsi], k.regs[kRdx],
             k.regs[kR10], k.regs[kR8],  k.regs[kR9]};
  step.syscall = ev;
  const auto& a = ev.args;

  Result<uint64_t, MemFault> ret = uint64_t{0};
  switch (ev.number) {
    case abi::kSysRead:
      ret = SysRead(ks, a[0], a[1], a[2]);
      break;
    case abi::kSysWrite:
      ret = SysWrite(ks, a[0], a[1], a[2]);
      break;
    case abi::kSysMmap:
      ret = SysMmap(ks, a[0], a[1], a[2], a[3], a[4], a[5]);
      break;
    case abi::kSysExit:
    case abi::kSysExitGroup:
      step.status = KernelStep::Status::kExited;
      step.exit_code = static_cast<uint8_t>(a[0]);
      return step;
    default:
      k.rip = step.rip;
      return FaultStep(step, FaultInfo{k.rip, UnknownSyscall{ev.number}});
  }
  if (!ret) {
    k.rip = step.rip;
    return FaultStep(step, FaultInfo{k.rip, ret.error()});
  }
  k.regs[kRax] = *ret;
  k.regs[kRcx] = k.rip;
  k.regs[kR11] = k.flags.ToRflags() | abi::kRflagsFixedBits;
  step.syscall->ret = *ret;
  return step;
}

KernelStep Step(KernelState& ks) {
  const uint64_t rip = ks.config.rip;
  StepOutcome out = StepCore(ks.config);
  KernelStep step;
  switch (out.kind) {
    case StepOutcome::Kind::kNext:
      step.rip = rip;
      step.instr = std::move(out.instr);
      return step;
    case StepOutcome::Kind::kSyscall:
      step = DispatchSyscall(ks);
      step.instr = std::move(out.instr);
      return step;
    case StepOutcome::Kind::kFault:
      step.rip = rip;
      step.instr = std::move(out.instr);
      return FaultStep(std::move(step), std::move(*out.fault));
  }
  return step;
}

RunResult Run(KernelState& ks, uint64_t max_steps,
              const StepObserver& observer) {
  assert(max_steps > 0);
  for (uint64_t steps = 0; steps < max_steps; ++steps) {
    KernelStep step = Step(ks);
    if (observer) observer(ks, step);
    switch (step.status) {
      case KernelStep::Status::kRunning:
        break;
      case KernelStep::Status::kExited:
        return Exited{step.exit_code};
      case KernelStep::Status::kFaulted:
        return Faulted{std::move(*step.fault), steps};
    }
  }
  return StepLimit{max_steps};
}

}  // namespace runsem
