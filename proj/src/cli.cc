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

#include "runsem/cli.h"

#include <array>
#include <fstream>
#include <iostream>
#include <iterator>
#include <variant>

#include "fmt/format.h"
#include "runsem/elf.h"
#include "runsem/kernel.h"
#include "runsem/trace.h"

namespace runsem {
namespace {

std::optional<std::vector<uint8_t>> ReadFile(const std::string& path) {
  if (path == "-") {
    return std::vector<uint8_t>(std::istreambuf_iterator<char>(std::cin),
                                std::istreambuf_iterator<char>());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  return std::vector<uint8_t>(std::istreambuf_iterator<char>(in),
                              std::istreambuf_iterator<char>());
}

}  // namespace

int RunMain(const RunOptions& options, std::ostream& guest_out,
            std::ostream& diag) {
  auto elf_bytes = ReadFile(options.binary_path);
  if (!elf_bytes) {
    diag << "runsem: cannot read " << options.binary_path << "\n";
    return kExitBadElf;
  }
  auto image = ParseElf(*elf_bytes);
  if (!image) {
    diag << "runsem: " << options.binary_path << ": " << Describe(image.error())
         << "\n";
    return kExitBadElf;
  }

  std::vector<uint8_t> stdin_data;
  if (options.stdin_path) {
    auto data = ReadFile(*options.stdin_path);
    if (!data) {
      diag << "runsem: cannot read stdin file " << *options.stdin_path << "\n";
      return kExitBadElf;
    }
    stdin_data = std::move(*data);
  } else if (options.stdin_bytes) {
    stdin_data.assign(options.stdin_bytes->begin(), options.stdin_bytes->end());
  }

  std::vector<std::string> argv;
  argv.push_back(options.binary_path);
  argv.insert(argv.end(), options.args.begin(), options.args.end());
  auto initial = BuildInitialState(*image, argv, stdin_data);
  if (!initial) {
    diag << "runsem: " << options.binary_path << ": "
         << Describe(initial.error()) << "\n";
    return kExitBadElf;
  }
  KernelState ks = std::move(*initial);

  std::ofstream trace_file;
  std::ostream* trace_out = nullptr;
  if (options.trace) {
    if (options.trace_path) {
      trace_file.open(*options.trace_path, std::ios::binary | std::ios::trunc);
      if (!trace_file) {
        diag << "runsem: cannot open trace file " << *options.trace_path
             << "\n";
        return kExitBadElf;
      }
      trace_out = &trace_file;
    } else {
      trace_out = &diag;
    }
  }

  // Guest stdout is streamed from the KernelState's append-only list.
  size_t flushed = 0;
  uint64_t step_index = 0;
  std::array<uint64_t, kNumRegs> regs_before = ks.config.regs;
  auto observer = [&](const KernelState& state, const KernelStep& step) {
    if (trace_out != nullptr) {
      *trace_out << EmitTrace(
                        MakeTraceRecord(step_index, regs_before, state, step))
                 << '\n';
    }
    ++step_index;
    regs_before = state.config.regs;
    if (state.stdout_written.size() > flushed) {
      guest_out.write(
          reinterpret_cast<const char*>(state.stdout_written.data() + flushed),
          static_cast<std::streamsize>(state.stdout_written.size() - flushed));
      guest_out.flush();
      flushed = state.stdout_written.size();
    }
  };

  const RunResult result = Run(ks, options.max_steps, observer);
  if (trace_out != nullptr) trace_out->flush();

  if (const auto* exited = std::get_if<Exited>(&result)) return exited->code;
  if (const auto* faulted = std::get_if<Faulted>(&result)) {
    diag << fmt::format("runsem: guest faulted after {} steps: {}\n",
                        faulted->steps, Describe(faulted->fault));
    return kExitFaulted;
  }
  diag << fmt::format("runsem: step limit of {} reached\n",
                      std::get<StepLimit>(result).steps);
  return kExitStepLimit;
}

}  // namespace runsem
