// Copyright 2026 The seqgan Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace seqgan::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Bad flags, unknown verbs/splits/estimators, or schema drift between inputs.
struct UsageError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct CommonOptions {
  std::optional<std::uint64_t> seed_override;
  std::optional<std::filesystem::path> out_dir;
};

struct TrainOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> resume_checkpoint;
  CommonOptions common;
};

struct EvalOptions {
  std::vector<std::filesystem::path> checkpoints;  // several = ensemble
  std::string split = "test";
  CommonOptions common;
};

struct ProbeOptions {
  std::filesystem::path checkpoint;
  std::vector<std::string> estimators = {"scst", "gumbel_st"};
  std::string reward = "logD";
  std::size_t n_batches = 200;
  std::size_t batch_size = 8;
  double temperature = 0.5;
  CommonOptions common;
};

struct PlotsOptions {
  std::vector<std::filesystem::path> metrics_files;
  CommonOptions common;
};

struct GenDataOptions {
  std::filesystem::path config;
  CommonOptions common;
};

// Each command throws on failure; run() maps exceptions to exit codes.
void cmd_train(const TrainOptions& options);
void cmd_eval(const EvalOptions& options);
void cmd_grad_probe(const ProbeOptions& options);
void cmd_plots(const PlotsOptions& options);
void cmd_gen_data(const GenDataOptions& options);

// Full command line, including the verb; returns the process exit code.
int run(int argc, const char* const* argv);

}  // namespace seqgan::cli
