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

#ifndef DRUGRESP_REPORT_HPP_
#define DRUGRESP_REPORT_HPP_

#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "drugresp/metrics.hpp"

namespace drugresp {

// Shortest round-trip decimal; NaN prints as "undefined".
std::string format_real(double value);

std::string sha256_hex(std::string_view bytes);
// Throws kIo when the file cannot be read.
std::string sha256_file(const std::filesystem::path& path);

// Creates parent directories. Throws kIo on failure.
void write_text_file(const std::filesystem::path& path, std::string_view text);
std::string read_text_file(const std::filesystem::path& path);

// drug_id,cell_line_id,predicted,observed,cancer_type
std::string predictions_csv(std::span<const Prediction> predictions);

// group_id,pcc,n over defined groups only, in key order.
std::string grouped_pcc_csv(const std::map<std::string, GroupStat>& groups);

// Ids of groups whose correlation is undefined, in key order.
std::vector<std::string> undefined_groups(const std::map<std::string, GroupStat>& groups);

// epoch,model,val_pcc,train_loss
std::string history_csv(std::string_view model, std::span<const EpochRecord> history);

// Parses history_csv output, grouped by model in order of first appearance.
// Throws kSchema naming `source` on malformed content.
std::vector<std::pair<std::string, std::vector<EpochRecord>>> parse_history_csv(
    std::string_view text, std::string_view source);

// drug_id followed by one column per model; "undefined" marks missing scores.
std::string lodo_pcc_csv(std::span<const std::string> models,
                         std::span<const LodoScores> scores);

// drug_id,rank,gain_model_a,gain_model_b; "NA" when model B is absent.
std::string lodo_gains_csv(std::span<const GainRow> rows, bool has_model_b);

// epoch followed by one column per model; "stopped" after a model's last epoch.
std::string stability_csv(const StabilityTable& table);

// model,epochs,max_pcc,final_pcc,fluctuation
std::string stability_summary_csv(const StabilityTable& table);

}  // namespace drugresp

#endif  // DRUGRESP_REPORT_HPP_
