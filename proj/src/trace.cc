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

#include "runsem/trace.h"

#include "fmt/format.h"
#include "runsem/decoder.h"

namespace runsem {
namespace {

// Values in the top errno page are printed as negative numbers.
std::string Ret(uint64_t v, bool hex) {
  if (v >= ~uint64_t{4095}) return fmt::format("{}", static_cast<int64_t>(v));
  return hex ? fmt::format("{:#x}", v) : fmt::format("{}", v);
}

}  // namespace

std::string DescribeSyscall(const SyscallEvent& ev) {
  const auto& a = ev.args;
  std::string call;
  switch (ev.number) {
    case abi::kSysRead:
    case abi::kSysWrite:
      call = fmt::format("{}({}, {:#x}, {})", SyscallName(ev.number), a[0],
                         a[1], a[2]);
      break;
    case abi::kSysMmap:
      call = fmt::format("mmap({:#x}, {}, {:#x}, {:#x}, {:#x}, {:#x})", a[0],
                         a[1], a[2], a[3], a[4], a[5]);
      break;
    case abi::kSysExit:
    case abi::kSysExitGroup:
      call = fmt::format("{}({})", SyscallName(ev.number), a[0]);
      break;
    default:
      call = fmt::format("syscall_{}({:#x}, {:#x}, {:#x}, {:#x}, {:#x}, {:#x})",
                         ev.number, a[0], a[1], a[2], a[3], a[4], a[5]);
      break;
  }
  if (ev.ret) call += " = " + Ret(*ev.ret, ev.number == abi::kSysMmap);
  return call;
}

TraceRecord MakeTraceRecord(uint64_t step_index,
                            const std::array<uint64_t, kNumRegs>& regs_before,
                            const KernelState& after, const KernelStep& step) {
  TraceRecord rec;
  rec.step_index = step_index;
  rec.rip = step.rip;
  rec.instr_text = step.instr ? FormatInstr(*step.instr, step.rip) : "(bad)";
  for (int r = 0; r < kNumRegs; ++r) {
    if (after.config.regs[r] != regs_before[r]) {
      rec.regs_delta.emplace_back(static_cast<uint8_t>(r),
                                  after.config.regs[r]);
    }
  }
  rec.flags_after = after.config.flags;
  if (step.fault) {
    rec.event = "fault: " + Describe(*step.fault);
  } else if (step.syscall) {
    rec.event = "syscall " + DescribeSyscall(*step.syscall);
  }
  return rec;
}

std::string EmitTrace(const TraceRecord& rec) {
  std::string regs;
  for (const auto& [reg, value] : rec.regs_delta) {
    if (!regs.empty()) regs += ' ';
    regs += fmt::format("{}={:016x}", RegName(reg, WSize::kSz64), value);
  }
  const FlagSet& f = rec.flags_after;
  std::string line = fmt::format(
      "#{} {:016x} {} | {} | cf{:d} zf{:d} sf{:d} of{:d}", rec.step_index,
      rec.rip, rec.instr_text, regs, f.cf, f.zf, f.sf, f.of);
  if (rec.event) line += " | " + *rec.event;
  return line;
}

}  // namespace runsem
