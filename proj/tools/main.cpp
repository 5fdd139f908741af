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

#include <cstdio>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "drugresp/drugresp.h"

namespace {

using SessionPtr = std::unique_ptr<drugresp_session, decltype(&drugresp_session_destroy)>;

void print_progress(const char* line, void*) { std::fprintf(stderr, "%s\n", line); }

int fail(const drugresp_session* session, drugresp_status status) {
  std::fprintf(stderr, "drugresp: %s\n", drugresp_last_error(session));
  return static_cast<int>(status);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Drug response prediction from cell-line features and molecular graphs"};
  app.set_version_flag("--version", std::string(drugresp_version()));
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  std::string feature_source;
  std::vector<std::string> overrides;
  bool quiet = false;
  app.add_option("--config", config_path, "Run config file")->check(CLI::ExistingFile);
  app.add_option("--seed", seed, "Top-level seed");
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--feature-source", feature_source, "Cell feature source")
      ->check(CLI::IsMember({"scgpt", "scfoundation", "raw"}));
  app.add_option("--set", overrides, "Override a setting: section.key=value")->take_all();
  app.add_flag("-q,--quiet", quiet, "Suppress progress lines");

  auto* ingest = app.add_subcommand("ingest", "Load and join inputs, write the ingestion report");
  auto* train = app.add_subcommand("train", "Train one model variant");
  auto* eval = app.add_subcommand("eval", "Evaluate a checkpoint on the held-out split");
  std::string checkpoint;
  eval->add_option("--checkpoint", checkpoint, "Checkpoint file (default <out>/checkpoint.txt)");
  auto* lodo = app.add_subcommand("lodo", "Leave-one-drug-out comparison of feature sources");
  auto* report = app.add_subcommand("report", "Merge run histories into stability tables");
  std::vector<std::string> run_dirs;
  report->add_option("runs", run_dirs, "Run directories holding history.csv");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : static_cast<int>(DRUGRESP_ERR_USAGE);
  }

  SessionPtr session(drugresp_session_create(), &drugresp_session_destroy);
  if (!session) {
    std::fprintf(stderr, "drugresp: out of memory\n");
    return DRUGRESP_ERR_INTERNAL;
  }
  drugresp_session* s = session.get();
  if (!quiet) drugresp_set_progress(s, &print_progress, nullptr);

  drugresp_status status = DRUGRESP_OK;
  if (!config_path.empty() && (status = drugresp_load_config(s, config_path.c_str())) != 0) {
    return fail(s, status);
  }
  for (const auto& entry : overrides) {
    const auto eq = entry.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "drugresp: --set expects section.key=value, got '%s'\n", entry.c_str());
      return DRUGRESP_ERR_USAGE;
    }
    const std::string key = entry.substr(0, eq);
    const std::string value = entry.substr(eq + 1);
    if ((status = drugresp_set(s, key.c_str(), value.c_str())) != 0) return fail(s, status);
  }
  if (seed && (status = drugresp_set(s, "run.seed", std::to_string(*seed).c_str())) != 0) {
    return fail(s, status);
  }
  if (!out_dir.empty()) {
    const std::string absolute = std::filesystem::absolute(out_dir).lexically_normal().string();
    if ((status = drugresp_set(s, "paths.out", absolute.c_str())) != 0) return fail(s, status);
  }
  if (!feature_source.empty() &&
      (status = drugresp_set(s, "data.feature_source", feature_source.c_str())) != 0) {
    return fail(s, status);
  }

  if (*ingest) {
    status = drugresp_ingest(s);
  } else if (*train) {
    status = drugresp_train(s);
  } else if (*eval) {
    status = drugresp_eval(s, checkpoint.empty() ? nullptr : checkpoint.c_str());
  } else if (*lodo) {
    status = drugresp_lodo(s);
  } else if (*report) {
    std::vector<const char*> dirs;
    for (const auto& d : run_dirs) dirs.push_back(d.c_str());
    status = drugresp_report(s, dirs.data(), dirs.size());
  }
  if (status != DRUGRESP_OK) return fail(s, status);
  std::fputs(drugresp_last_summary(s), stdout);
  return 0;
}
