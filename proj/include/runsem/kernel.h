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

#ifndef RUNSEM_KERNEL_H_
#define RUNSEM_KERNEL_H_

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include "runsem/interpreter.h"
#include "runsem/machine.h"
#include "runsem/result.h"

namespace runsem {

// Linux x86-64 ABI constants understood by the syscall model. See
// docs/syscall_abi.md; these values are bit-exact.
namespace abi {
inline constexpr uint64_t kSysRead = 0;
inline constexpr uint64_t kSysWrite = 1;
inline constexpr uint64_t kSysMmap = 9;
inline constexpr uint64_t kSysExit = 60;
inline constexpr uint64_t kSysExitGroup = 231;

inline constexpr uint64_t kProtRead = 0x1;
inline constexpr uint64_t kProtWrite = 0x2;
inline constexpr uint64_t kProtExec = 0x4;

inline constexpr uint64_t kMapShared = 0x01;
inline constexpr uint64_t kMapPrivate = 0x02;
inline constexpr uint64_t kMapFixed = 0x10;
inline constexpr uint64_t kMapAnonymous = 0x20;

inline constexpr uint64_t kEBADF = 9;
inline constexpr uint64_t kENOMEM = 12;
inline constexpr uint64_t kEINVAL = 22;

// Syscall return encoding of -errno.
constexpr uint64_t Errno(uint64_t e) { return ~e + 1; }

// First address handed out by the anonymous mmap allocator.
inline constexpr uint64_t kMmapBase = 0x0000'2000'0000'0000;

// RFLAGS bits always set in the image stored to R11 by SYSCALL: the
// reserved bit 1 and IF.
inline constexpr uint64_t kRflagsFixedBits = 0x202;
}  // namespace abi

std::string_view SyscallName(uint64_t number);

// The machine plus its two byte streams. stdin is consumed from the front
// only; stdout is append-only.
struct KernelState {
  Config config;
  std::vector<uint8_t> stdin_data;
  uint64_t stdin_consumed = 0;
  std::vector<uint8_t> stdout_written;
  uint64_t mmap_cursor = abi::kMmapBase;

  std::span<const uint8_t> stdin_remaining() const {
    return std::span(stdin_data).subspan(stdin_consumed);
  }

  friend bool operator==(const KernelState&, const KernelState&) = default;
};

struct SyscallEvent {
  uint64_t number = 0;
  std::array<uint64_t, 6> args{};
  std::optional<uint64_t> ret;  // absent for exit

  friend bool operator==(const SyscallEvent&, const SyscallEvent&) = default;
};

// Everything one step did, for callers that trace or stream output.
struct KernelStep {
  enum class Status : uint8_t { kRunning, kExited, kFaulted };
  Status status = Status::kRunning;
  uint64_t rip = 0;  // address of the instruction this step executed
  std::optional<Instr> instr;
  std::optional<SyscallEvent> syscall;
  std::optional<FaultInfo> fault;
  uint8_t exit_code = 0;
};

struct Exited {
  uint8_t code = 0;
  friend bool operator==(const Exited&, const Exited&) = default;
};
struct Faulted {
  FaultInfo fault;
  uint64_t steps = 0;  // steps completed before the faulting one
  friend bool operator==(const Faulted&, const Faulted&) = default;
};
struct StepLimit {
  uint64_t steps = 0;
  friend bool operator==(const StepLimit&, const StepLimit&) = default;
};
using RunResult = std::variant<Exited, Faulted, StepLimit>;

// One step of the IO-extended machine. A faulting step leaves `ks` as it was.
KernelStep Step(KernelState& ks);

// Services the syscall whose instruction has just executed (config.rip is
// past it). Sets RAX to the result, RCX to the return RIP and R11 to the
// flags image.
KernelStep DispatchSyscall(KernelState& ks);

Result<uint64_t, MemFault> SysRead(KernelState& ks, uint64_t fd, uint64_t buf,
                                   uint64_t count);
Result<uint64_t, MemFault> SysWrite(KernelState& ks, uint64_t fd, uint64_t buf,
                                    uint64_t count);
uint64_t SysMmap(KernelState& ks, uint64_t addr, uint64_t len, uint64_t prot,
                 uint64_t flags, uint64_t fd, uint64_t off);

using StepObserver = std::function<void(const KernelState&, const KernelStep&)>;

// Steps until exit, fault, or max_steps completed steps. Requires
// max_steps > 0. The observer, if any, sees every step including the last.
RunResult Run(KernelState& ks, uint64_t max_steps,
              const StepObserver& observer = nullptr);

}  // namespace runsem

#endif  // RUNSEM_KERNEL_H_
