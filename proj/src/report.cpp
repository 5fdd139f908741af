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

#include "drugresp/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "csv.hpp"
#include "drugresp/error.hpp"

namespace drugresp {

namespace fs = std::filesystem;

namespace {

std::string optional_real(const std::optional<double>& v, std::string_view missing) {
  return v ? format_real(*v) : std::string(missing);
}

}  // namespace

std::string format_real(double value) {
  return std::isnan(value) ? std::string("undefined") : csv::format_double(value);
}

std::string sha256_hex(std::string_view bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1) {
    throw Error(ErrorKind::kIo, "sha256 digest failed");
  }
  std::string hex;
  hex.reserve(2 * length);
  for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

std::string sha256_file(const fs::path& path) { return sha256_hex(read_text_file(path)); }

void write_text_file(const fs::path& path, std::string_view text) {
  std::error_code ec;
  if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
  if (ec) {
    throw Error(ErrorKind::kIo, fmt::format("cannot create directory {}: {}",
                                            path.parent_path().string(), ec.message()));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw Error(ErrorKind::kIo, fmt::format("cannot write {}", path.string()));
}

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, fmt::format("cannot read {}", path.string()));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string predictions_csv(std::span<const Prediction> predictions) {
  std::string out = "drug_id,cell_line_id,predicted,observed,cancer_type\n";
  for (const auto& p : predictions) {
    out += fmt::format("{},{},{},{},{}\n", p.drug_id, p.cell_line_id, format_real(p.predicted),
                       format_real(p.observed), p.cancer_type.value_or(""));
  }
  return out;
}

std::string grouped_pcc_csv(const std::map<std::string, GroupStat>& groups) {
  std::string out = "group_id,pcc,n\n";
  for (const auto& [id, stat] : groups) {
    if (stat.pcc) out += fmt::format("{},{},{}\n", id, format_real(*stat.pcc), stat.n);
  }
  return out;
}

std::vector<std::string> undefined_groups(const std::map<std::string, GroupStat>& groups) {
  std::vector<std::string> ids;
  for (const auto& [id, stat] : groups) {
    if (!stat.pcc) ids.push_back(id);
  }
  return ids;
}

std::string history_csv(std::string_view model, std::span<const EpochRecord> history) {
  std::string out = "epoch,model,val_pcc,train_loss\n";
  for (const auto& r : history) {
    out += fmt::format("{},{},{},{}\n", r.epoch, model, format_real(r.val_pcc),
                       format_real(r.train_loss));
  }
  return out;
}

std::vector<std::pair<std::string, std::vector<EpochRecord>>> parse_history_csv(
    std::string_view text, std::string_view source) {
  std::vector<std::pair<std::string, std::vector<EpochRecord>>> out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t number = 0;
  bool header_seen = false;
  auto fail = [&](std::string_view why) {
    throw Error(ErrorKind::kSchema, fmt::format("{} line {}: {}", source, number, why));
  };
  auto real = [&](std::string_view field) {
    if (field == "undefined") return std::nan("");
    const auto v = csv::to_double(field);
    if (!v) fail(fmt::format("'{}' is not a number", field));
    return *v;
  };
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (csv::trim(line).empty()) continue;
    const auto fields = csv::split(line);
    if (!header_seen) {
      if (fields.size() != 4 || fields[0] != "epoch" || fields[1] != "model" ||
          fields[2] != "val_pcc" || fields[3] != "train_loss") {
        fail("expected header epoch,model,val_pcc,train_loss");
      }
      header_seen = true;
      continue;
    }
    if (fields.size() != 4) fail(fmt::format("expected 4 fields, found {}", fields.size()));
    const auto epoch = csv::to_integer(fields[0]);
    if (!epoch) fail(fmt::format("'{}' is not an epoch number", fields[0]));
    EpochRecord record{static_cast<int>(*epoch), real(fields[3]), real(fields[2])};
    const std::string model(fields[1]);
    auto it = std::find_if(out.begin(), out.end(),
                           [&model](const auto& entry) { return entry.first == model; });
    if (it == out.end()) {
      out.emplace_back(model, std::vector<EpochRecord>{});
      it = std::prev(out.end());
    }
    it->second.push_back(record);
  }
  if (!header_seen) {
    throw Error(ErrorKind::kSchema, fmt::format("{} is empty", source));
  }
  return out;
}

std::string lodo_pcc_csv(std::span<const std::string> models,
                         std::span<const LodoScores> scores) {
  if (models.size() != scores.size() || models.empty()) {
    throw Error(ErrorKind::kContract, "lodo_pcc_csv: one score map per model required");
  }
  std::string out = "drug_id";
  for (const auto& m : models) out += "," + m;
  out += "\n";
  for (const auto& [drug, unused] : scores.front()) {
    out += drug;
    for (const auto& s : scores) {
      const auto it = s.find(drug);
      out += ",";
      out += it == s.end() ? std::string("undefined") : optional_real(it->second, "undefined");
    }
    out += "\n";
  }
  return out;
}

std::string lodo_gains_csv(std::span<const GainRow> rows, bool has_model_b) {
  std::string out = "drug_id,rank,gain_model_a,gain_model_b\n";
  for (const auto& r : rows) {
    out += fmt::format("{},{},{},{}\n", r.drug_id, r.rank, optional_real(r.gain_a, "undefined"),
                       has_model_b ? optional_real(r.gain_b, "undefined") : std::string("NA"));
  }
  return out;
}

std::string stability_csv(const StabilityTable& table) {
  std::string out = "epoch";
  for (const auto& m : table.models) out += "," + m;
  out += "\n";
  for (std::size_t e = 0; e < table.epochs.size(); ++e) {
    out += std::to_string(table.epochs[e]);
    for (const auto& cell : table.cells[e]) {
      out += ",";
      out += cell ? format_real(*cell) : std::string("stopped");
    }
    out += "\n";
  }
  return out;
}

std::string stability_summary_csv(const StabilityTable& table) {
  std::string out = "model,epochs,max_pcc,final_pcc,fluctuation\n";
  for (const auto& s : table.summaries) {
    out += fmt::format("{},{},{},{},{}\n", s.model, s.epochs, format_real(s.max_pcc),
                       format_real(s.final_pcc), format_real(s.fluctuation));
  }
  return out;
}

}  // namespace drugresp
