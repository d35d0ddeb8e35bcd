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

#ifndef RUNSEM_TRACE_H_
#define RUNSEM_TRACE_H_

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "runsem/kernel.h"
#include "runsem/machine.h"

namespace runsem {

struct TraceRecord {
  uint64_t step_index = 0;
  uint64_t rip = 0;
  std::string instr_text;
  std::vector<std::pair<uint8_t, uint64_t>> regs_delta;  // changed only
  FlagSet flags_after;
  std::optional<std::string> event;
};

// Builds the record for a step, given the registers as they were before it.
TraceRecord MakeTraceRecord(uint64_t step_index,
                            const std::array<uint64_t, kNumRegs>& regs_before,
                            const KernelState& after, const KernelStep& step);

// One line, no trailing newline:
//   #<idx> <rip:016x> <instr> | <reg>=<016x> ... | cf0 zf0 sf0 of0[ | <event>]
std::string EmitTrace(const TraceRecord& record);

// "write(1, 0x402000, 13) = 13"
std::string DescribeSyscall(const SyscallEvent& event);

}  // namespace runsem

#endif  // RUNSEM_TRACE_H_
