// Copyright 2026 The drugresp Authors.
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

#ifndef DRUGRESP_COMMANDS_HPP_
#define DRUGRESP_COMMANDS_HPP_

#include <filesystem>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "drugresp/config.hpp"
#include "drugresp/dataset.hpp"
#include "drugresp/omics.hpp"

namespace drugresp {

// Stable process exit codes.
enum class ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kIngest = 2,
  kTraining = 3,
  kEval = 4,
  kReport = 5,
};

class CommandError : public std::runtime_error {
 public:
  CommandError(ExitCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}
  ExitCode code() const noexcept { return code_; }

 private:
  ExitCode code_;
};

// Receives one human-readable progress line at a time.
using ProgressFn = std::function<void(std::string_view)>;

struct IngestResult {
  Dataset data;
  JoinStats join;
  std::optional<AlignmentReport> alignment;  // raw expression only
  std::size_t response_rows = 0;
  std::size_t drugs_loaded = 0;
  std::size_t cells_loaded = 0;
  // Input name → sha256 of its bytes.
  std::map<std::string, std::string> data_hashes;
};

// Loads and joins everything `source` needs. Every failure surfaces as
// CommandError(kIngest) with the file and row context of the cause.
IngestResult ingest_inputs(const RunConfig& cfg, FeatureSource source);

// Each command writes its files under cfg.paths.out and returns a JSON
// summary document. Failures are CommandError with the contract exit code.
std::string cmd_ingest(const RunConfig& cfg, const ProgressFn& progress = {});
std::string cmd_train(const RunConfig& cfg, const ProgressFn& progress = {});
// An empty checkpoint path means <out>/checkpoint.txt.
std::string cmd_eval(const RunConfig& cfg, const std::filesystem::path& checkpoint,
                     const ProgressFn& progress = {});
std::string cmd_lodo(const RunConfig& cfg, const ProgressFn& progress = {});
// An empty run list falls back to cfg.report_runs.
std::string cmd_report(const RunConfig& cfg, const std::vector<std::filesystem::path>& run_dirs,
                       const ProgressFn& progress = {});

}  // namespace drugresp

#endif  // DRUGRESP_COMMANDS_HPP_
