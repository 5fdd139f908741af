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

#include "drugresp/commands.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <fmt/format.h>

#include "drugresp/error.hpp"
#include "drugresp/metrics.hpp"
#include "drugresp/model.hpp"
#include "drugresp/molgraph.hpp"
#include "drugresp/report.hpp"
#include "drugresp/seeds.hpp"
#include "drugresp/splits.hpp"
#include "drugresp/trainer.hpp"
#include "json.hpp"

namespace drugresp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::string_view kCheckpointFile = "checkpoint.txt";
constexpr std::string_view kHistoryFile = "history.csv";
constexpr std::string_view kManifestFile = "run_manifest.json";

template <class F>
auto guarded(ExitCode code, std::string_view stage, F&& body) {
  try {
    return body();
  } catch (const CommandError&) {
    throw;
  } catch (const std::exception& e) {
    throw CommandError(code, fmt::format("{}: {}", stage, e.what()));
  }
}

void emit(const ProgressFn& progress, std::string_view line) {
  if (progress) progress(line);
}

const fs::path& require_file(const fs::path& path, std::string_view key) {
  if (path.empty()) throw Error(ErrorKind::kIo, fmt::format("{} is not set", key));
  if (!fs::is_regular_file(path)) {
    throw Error(ErrorKind::kIo, fmt::format("{} file not found: {}", key, path.string()));
  }
  return path;
}

std::string drug_files_hash(const fs::path& manifest) {
  std::string listing;
  for (const auto& e : load_drug_manifest(manifest)) {
    listing += fmt::format("{} {} {} {}\n", e.drug_id, sha256_file(e.features),
                           sha256_file(e.adjacency), sha256_file(e.degrees));
  }
  return sha256_hex(listing);
}

// Model config for a dataset: the file config with the input width taken
// from the features actually loaded.
ModelConfig model_for(const RunConfig& cfg, const Dataset& data) {
  ModelConfig model = cfg.model;
  model.cell_input_dim = data.cell_dim();
  guarded(ExitCode::kUsage, "config", [&] {
    model.validate();
    return 0;
  });
  return model;
}

SplitSpec split_for(const RunConfig& cfg) {
  SplitSpec spec = cfg.split;
  spec.seed = cfg.seed;
  guarded(ExitCode::kUsage, "config", [&] {
    spec.validate();
    return 0;
  });
  return spec;
}

TrainConfig train_for(const RunConfig& cfg, std::uint64_t seed) {
  TrainConfig tc = cfg.train;
  tc.seed = seed;
  return tc;
}

std::string ingest_report_text(const RunConfig& cfg, FeatureSource source, const IngestResult& r) {
  std::string out;
  auto put = [&out](std::string_view key, const auto& value) {
    out += fmt::format("{}={}\n", key, value);
  };
  put("feature_source", to_string(source));
  put("feature_dim", r.data.cell_dim());
  put("ic50_axis", "IC50 (as provided)");
  put("responses.rows", r.response_rows);
  put("drugs.loaded", r.drugs_loaded);
  put("drugs.n_max_atoms", cfg.model.n_max_atoms);
  put("cells.loaded", r.cells_loaded);
  if (r.alignment) {
    put("genes.matched", r.alignment->matched);
    put("genes.padded", r.alignment->padded);
    put("genes.dropped", r.alignment->dropped);
  }
  put("join.total", r.join.total);
  put("join.matched", r.join.matched);
  put("join.missing_drug", r.join.missing_drug);
  put("join.missing_cell", r.join.missing_cell);
  put("join.unmatched_rows", r.join.unmatched.size());
  put("dataset.drugs", r.data.drug_ids.size());
  put("dataset.cells", r.data.cell_ids.size());
  put("dataset.samples", r.data.samples.size());
  for (const auto& [name, hash] : r.data_hashes) put(fmt::format("sha256.{}", name), hash);
  return out;
}

std::string unmatched_csv(const JoinStats& stats) {
  std::string out = "row,drug_id,cell_line_id,reason\n";
  for (const auto& u : stats.unmatched) {
    const char* reason = u.missing_drug && u.missing_cell ? "missing_drug+missing_cell"
                         : u.missing_drug                  ? "missing_drug"
                                                           : "missing_cell";
    out += fmt::format("{},{},{},{}\n", u.row, u.drug_id, u.cell_line_id, reason);
  }
  return out;
}

json config_json(const RunConfig& cfg) {
  json out = json::object();
  std::istringstream in(canonical_text(cfg));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    out[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return out;
}

json inputs_json(const RunConfig& cfg, FeatureSource source) {
  json out = json::object();
  out["responses"] = cfg.paths.responses.string();
  out["drug_manifest"] = cfg.paths.drug_manifest.string();
  switch (source) {
    case FeatureSource::kScgpt: out["embeddings"] = cfg.paths.embeddings_scgpt.string(); break;
    case FeatureSource::kScfoundation:
      out["embeddings"] = cfg.paths.embeddings_scfoundation.string();
      break;
    case FeatureSource::kRawExpression:
      out["expression"] = cfg.paths.expression.string();
      if (!cfg.paths.genes.empty()) out["genes"] = cfg.paths.genes.string();
      break;
  }
  return out;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::string dump(const json& doc) { return doc.dump(2) + "\n"; }

std::vector<std::string> config_differences(const ModelConfig& a, const ModelConfig& b) {
  std::vector<std::string> diff;
  if (a.gcn_layer_dims != b.gcn_layer_dims) diff.emplace_back("gcn_layer_dims");
  if (a.cell_branch_dims != b.cell_branch_dims) diff.emplace_back("cell_branch_dims");
  if (a.head_dims != b.head_dims) diff.emplace_back("head_dims");
  if (a.dropout_rate != b.dropout_rate) diff.emplace_back("dropout_rate");
  if (a.use_batch_norm != b.use_batch_norm) diff.emplace_back("use_batch_norm");
  if (a.task != b.task) diff.emplace_back("task");
  if (a.n_max_atoms != b.n_max_atoms) diff.emplace_back("n_max_atoms");
  if (a.cell_input_dim != b.cell_input_dim) diff.emplace_back("cell_input_dim");
  if (a.self_loops != b.self_loops) diff.emplace_back("self_loops");
  if (a.bn_momentum != b.bn_momentum) diff.emplace_back("bn_momentum");
  if (a.bn_epsilon != b.bn_epsilon) diff.emplace_back("bn_epsilon");
  return diff;
}

}  // namespace

IngestResult ingest_inputs(const RunConfig& cfg, FeatureSource source) {
  return guarded(ExitCode::kIngest, "ingest", [&] {
    IngestResult r;
    const auto& responses_path = require_file(cfg.paths.responses, "paths.responses");
    const auto& manifest_path = require_file(cfg.paths.drug_manifest, "paths.drug_manifest");

    CellFeatureSet cells;
    switch (source) {
      case FeatureSource::kScgpt:
      case FeatureSource::kScfoundation: {
        const bool scgpt = source == FeatureSource::kScgpt;
        const auto& path = require_file(
            scgpt ? cfg.paths.embeddings_scgpt : cfg.paths.embeddings_scfoundation,
            scgpt ? "paths.embeddings_scgpt" : "paths.embeddings_scfoundation");
        cells = load_embeddings(path, source);
        r.data_hashes["embeddings"] = sha256_file(path);
        break;
      }
      case FeatureSource::kRawExpression: {
        const auto& path = require_file(cfg.paths.expression, "paths.expression");
        const auto profiles = load_expression(path);
        r.data_hashes["expression"] = sha256_file(path);
        std::vector<std::string> genes;
        if (!cfg.paths.genes.empty()) {
          const auto& genes_path = require_file(cfg.paths.genes, "paths.genes");
          genes = load_gene_list(genes_path);
          r.data_hashes["genes"] = sha256_file(genes_path);
        }
        AlignmentReport report;
        cells = build_expression_features(profiles, genes, &report);
        r.alignment = report;
        break;
      }
    }
    r.cells_loaded = cells.vectors.size();

    const auto responses = load_responses(responses_path);
    r.response_rows = responses.size();
    r.data_hashes["responses"] = sha256_file(responses_path);

    const auto drugs = load_drugs(manifest_path);
    r.drugs_loaded = drugs.size();
    r.data_hashes["drug_manifest"] = sha256_file(manifest_path);
    r.data_hashes["drug_graphs"] = drug_files_hash(manifest_path);

    r.data = join_dataset(responses, drugs, cells, cfg.model.n_max_atoms, cfg.model.self_loops,
                          &r.join);
    if (r.data.samples.empty()) {
      throw Error(ErrorKind::kEmptySet,
                  fmt::format("no response row of {} matched both a drug graph and cell features "
                              "({} missing drug, {} missing cell)",
                              responses_path.string(), r.join.missing_drug,
                              r.join.missing_cell));
    }
    return r;
  });
}

std::string cmd_ingest(const RunConfig& cfg, const ProgressFn& progress) {
  const IngestResult r = ingest_inputs(cfg, cfg.feature_source);
  guarded(ExitCode::kIngest, "ingest", [&] {
    write_text_file(cfg.paths.out / "ingest_report.txt",
                    ingest_report_text(cfg, cfg.feature_source, r));
    write_text_file(cfg.paths.out / "unmatched_rows.csv", unmatched_csv(r.join));
    return 0;
  });
  emit(progress, fmt::format("ingest: {} of {} response rows matched ({} missing drug, {} "
                             "missing cell)",
                             r.join.matched, r.join.total, r.join.missing_drug,
                             r.join.missing_cell));
  json doc;
  doc["command"] = "ingest";
  doc["feature_source"] = std::string(to_string(cfg.feature_source));
  doc["feature_dim"] = r.data.cell_dim();
  doc["matched"] = r.join.matched;
  doc["total"] = r.join.total;
  doc["missing_drug"] = r.join.missing_drug;
  doc["missing_cell"] = r.join.missing_cell;
  doc["samples"] = r.data.samples.size();
  return dump(doc);
}

std::string cmd_train(const RunConfig& cfg, const ProgressFn& progress) {
  const IngestResult in = ingest_inputs(cfg, cfg.feature_source);
  const Dataset& data = in.data;
  const ModelConfig model = model_for(cfg, data);
  const SplitSpec spec = split_for(cfg);
  const std::string name = cfg.model_name();

  const SplitResult parts =
      guarded(ExitCode::kTraining, "split", [&] { return split_dataset(data.samples.size(), spec); });
  emit(progress, fmt::format("train {}: {} train / {} validation records ({} beyond the cap)",
                             name, parts.train.size(), parts.test.size(),
                             parts.capped_out.size()));

  const TrainResult result = guarded(ExitCode::kTraining, "train", [&] {
    return train(data, parts.train, parts.test, model, train_for(cfg, cfg.seed),
                 [&](const EpochRecord& r) {
                   emit(progress, fmt::format("epoch {}: train_loss={} val_pcc={}", r.epoch,
                                              format_real(r.train_loss), format_real(r.val_pcc)));
                 });
  });

  const fs::path checkpoint = cfg.paths.out / kCheckpointFile;
  std::string checkpoint_hash;
  guarded(ExitCode::kTraining, "train output", [&] {
    save_checkpoint(checkpoint, model, result.params);
    write_text_file(cfg.paths.out / kHistoryFile, history_csv(name, result.history));
    checkpoint_hash = sha256_file(checkpoint);
    return 0;
  });

  json manifest;
  manifest["command"] = "train";
  manifest["model"] = name;
  manifest["feature_source"] = std::string(to_string(cfg.feature_source));
  manifest["seed"] = cfg.seed;
  manifest["derived_seeds"] = {
      {"split", derive_seed(cfg.seed, "split")},     {"cap", derive_seed(cfg.seed, "cap")},
      {"init", derive_seed(cfg.seed, "init")},       {"shuffle", derive_seed(cfg.seed, "shuffle")},
      {"dropout", derive_seed(cfg.seed, "dropout")},
  };
  manifest["config"] = config_json(cfg);
  manifest["config_sha256"] = sha256_hex(canonical_text(cfg));
  manifest["inputs"] = inputs_json(cfg, cfg.feature_source);
  manifest["data_sha256"] = in.data_hashes;
  manifest["cell_input_dim"] = model.cell_input_dim;
  manifest["split"] = {{"train", parts.train.size()},
                       {"validation", parts.test.size()},
                       {"capped_out", parts.capped_out.size()}};
  manifest["epochs_run"] = result.history.size();
  manifest["best_epoch"] = result.best_epoch;
  manifest["checkpoint"] = std::string(kCheckpointFile);
  manifest["checkpoint_sha256"] = checkpoint_hash;
  guarded(ExitCode::kTraining, "train output", [&] {
    write_text_file(cfg.paths.out / kManifestFile, dump(manifest));
    return 0;
  });

  json doc;
  doc["command"] = "train";
  doc["model"] = name;
  doc["epochs_run"] = result.history.size();
  doc["best_epoch"] = result.best_epoch;
  doc["final_val_pcc"] =
      result.history.empty() ? json(nullptr) : json(result.history.back().val_pcc);
  doc["checkpoint_sha256"] = checkpoint_hash;
  return dump(doc);
}

std::string cmd_eval(const RunConfig& cfg, const fs::path& checkpoint_arg,
                     const ProgressFn& progress) {
  const IngestResult in = ingest_inputs(cfg, cfg.feature_source);
  const Dataset& data = in.data;
  const ModelConfig model = model_for(cfg, data);
  const SplitSpec spec = split_for(cfg);
  const fs::path checkpoint =
      checkpoint_arg.empty() ? cfg.paths.out / kCheckpointFile : checkpoint_arg;

  Checkpoint ckpt =
      guarded(ExitCode::kEval, "checkpoint", [&] { return load_checkpoint(checkpoint); });
  if (!(ckpt.config == model)) {
    std::string fields;
    for (const auto& f : config_differences(ckpt.config, model)) {
      fields += fields.empty() ? f : ", " + f;
    }
    throw CommandError(ExitCode::kEval,
                       fmt::format("checkpoint {} does not match the run config (differs in: {})",
                                   checkpoint.string(), fields));
  }

  const SplitResult parts =
      guarded(ExitCode::kEval, "split", [&] { return split_dataset(data.samples.size(), spec); });
  const std::string ckpt_hash =
      guarded(ExitCode::kEval, "checkpoint", [&] { return sha256_file(checkpoint); });

  json doc;
  guarded(ExitCode::kEval, "eval", [&] {
    const auto predicted = predict_samples(data, parts.test, ckpt.params, ckpt.config);
    const auto predictions = collect_predictions(data, parts.test, predicted);
    std::vector<double> observed;
    observed.reserve(predictions.size());
    for (const auto& p : predictions) observed.push_back(p.observed);
    const auto overall = pearson(predicted, observed);

    write_text_file(cfg.paths.out / "predictions.csv", predictions_csv(predictions));
    doc["command"] = "eval";
    doc["model"] = cfg.model_name();
    doc["checkpoint_sha256"] = ckpt_hash;
    doc["config_sha256"] = sha256_hex(canonical_text(cfg));
    doc["ic50_axis"] = "IC50 (as provided)";
    doc["n_test"] = predictions.size();
    doc["overall_pcc"] = optional_json(overall);
    for (auto kind : {GroupKind::kCellLine, GroupKind::kCancerType, GroupKind::kDrug}) {
      const auto groups = grouped_pcc(predictions, kind);
      const std::string key(to_string(kind));
      write_text_file(cfg.paths.out / fmt::format("grouped_pcc_{}.csv", key),
                      grouped_pcc_csv(groups));
      const auto undefined = undefined_groups(groups);
      doc["grouped"][key] = {{"groups", groups.size()},
                             {"defined", groups.size() - undefined.size()},
                             {"undefined", undefined}};
    }
    write_text_file(cfg.paths.out / "eval_summary.json", dump(doc));
    emit(progress, fmt::format("eval {}: {} test records, overall pcc {}", cfg.model_name(),
                               predictions.size(),
                               overall ? format_real(*overall) : std::string("undefined")));
    return 0;
  });
  return dump(doc);
}

std::string cmd_lodo(const RunConfig& cfg, const ProgressFn& progress) {
  if (cfg.lodo.models.empty() || cfg.lodo.models.size() > 2) {
    throw CommandError(ExitCode::kUsage,
                       fmt::format("lodo.models must name one or two feature sources, got {}",
                                   cfg.lodo.models.size()));
  }
  std::vector<FeatureSource> variants = cfg.lodo.models;
  if (std::find(variants.begin(), variants.end(), cfg.lodo.baseline) != variants.end()) {
    throw CommandError(ExitCode::kUsage, "lodo.baseline must differ from lodo.models");
  }
  variants.push_back(cfg.lodo.baseline);

  std::vector<IngestResult> inputs;
  std::vector<ModelConfig> models;
  std::vector<std::vector<std::string>> record_drugs;
  for (auto source : variants) {
    inputs.push_back(ingest_inputs(cfg, source));
    models.push_back(model_for(cfg, inputs.back().data));
    const Dataset& data = inputs.back().data;
    std::vector<std::string> drugs;
    drugs.reserve(data.samples.size());
    for (const auto& s : data.samples) drugs.push_back(data.drug_ids[s.drug]);
    record_drugs.push_back(std::move(drugs));
  }

  // Held-out drugs come from those every variant can evaluate, so folds pair up.
  std::set<std::string> common(record_drugs.front().begin(), record_drugs.front().end());
  for (std::size_t v = 1; v < variants.size(); ++v) {
    const std::set<std::string> mine(record_drugs[v].begin(), record_drugs[v].end());
    std::set<std::string> kept;
    std::set_intersection(common.begin(), common.end(), mine.begin(), mine.end(),
                          std::inserter(kept, kept.end()));
    common = std::move(kept);
  }
  const std::vector<std::string> pool(common.begin(), common.end());
  const auto held_out = guarded(ExitCode::kUsage, "lodo", [&] {
    return sample_drugs(pool, cfg.lodo.n_drugs, cfg.seed);
  });
  if (!(cfg.lodo.val_fraction > 0.0 && cfg.lodo.val_fraction < 1.0)) {
    throw CommandError(ExitCode::kUsage, "lodo.val_fraction must lie in (0, 1)");
  }

  std::vector<std::vector<LodoFold>> folds;
  for (const auto& drugs : record_drugs) folds.push_back(lodo_folds(drugs, held_out));

  const std::size_t n_folds = held_out.size();
  const std::size_t n_tasks = variants.size() * n_folds;
  std::vector<std::optional<double>> scores(n_tasks);
  std::vector<std::size_t> test_sizes(n_tasks, 0);
  std::vector<std::exception_ptr> failures(n_tasks);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> abort{false};
  std::mutex progress_mutex;

  auto run_task = [&](std::size_t t) {
    const std::size_t v = t / n_folds;
    const std::size_t k = t % n_folds;
    const Dataset& data = inputs[v].data;
    const LodoFold& fold = folds[v][k];
    const std::uint64_t fold_seed = derive_seed(cfg.seed, "fold", k);

    SplitSpec val_spec;
    val_spec.test_fraction = cfg.lodo.val_fraction;
    val_spec.train_cap.reset();
    val_spec.seed = fold_seed;
    const SplitResult inner = split_dataset(fold.train.size(), val_spec);
    std::vector<std::size_t> train_idx, val_idx;
    for (auto i : inner.train) train_idx.push_back(fold.train[i]);
    for (auto i : inner.test) val_idx.push_back(fold.train[i]);

    TrainResult result = train(data, train_idx, val_idx, models[v], train_for(cfg, fold_seed));
    const auto predicted = predict_samples(data, fold.test, result.params, models[v]);
    std::vector<double> observed;
    for (auto i : fold.test) observed.push_back(data.samples[i].label);
    scores[t] = pearson(predicted, observed);
    test_sizes[t] = fold.test.size();
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(fmt::format("lodo {} fold {}/{} ({}): pcc {}", to_string(variants[v]), k + 1,
                           n_folds, fold.held_out_drug,
                           scores[t] ? format_real(*scores[t]) : std::string("undefined")));
    }
  };
  auto worker = [&] {
    for (std::size_t t; !abort && (t = next++) < n_tasks;) {
      try {
        run_task(t);
      } catch (...) {
        failures[t] = std::current_exception();
        abort = true;
      }
    }
  };
  const std::size_t n_workers = std::min(effective_workers(cfg), n_tasks);
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool_threads;
    for (std::size_t i = 0; i < n_workers; ++i) pool_threads.emplace_back(worker);
  }
  for (std::size_t t = 0; t < n_tasks; ++t) {
    if (!failures[t]) continue;
    const std::size_t v = t / n_folds;
    const std::size_t k = t % n_folds;
    try {
      std::rethrow_exception(failures[t]);
    } catch (const std::exception& e) {
      throw CommandError(ExitCode::kTraining,
                         fmt::format("lodo {} fold {} (held-out drug {}): {}",
                                     to_string(variants[v]), k + 1, held_out[k], e.what()));
    }
  }

  std::vector<std::string> names;
  std::vector<LodoScores> per_variant(variants.size());
  for (std::size_t v = 0; v < variants.size(); ++v) {
    names.emplace_back(to_string(variants[v]));
    for (std::size_t k = 0; k < n_folds; ++k) per_variant[v][held_out[k]] = scores[v * n_folds + k];
  }
  const bool has_b = cfg.lodo.models.size() == 2;
  const auto gains = guarded(ExitCode::kTraining, "lodo", [&] {
    return compare_models(per_variant[0], has_b ? &per_variant[1] : nullptr, per_variant.back());
  });

  json doc;
  doc["command"] = "lodo";
  doc["seed"] = cfg.seed;
  doc["config_sha256"] = sha256_hex(canonical_text(cfg));
  doc["model_a"] = names[0];
  doc["model_b"] = has_b ? json(names[1]) : json(nullptr);
  doc["baseline"] = names.back();
  doc["held_out_drugs"] = held_out;
  doc["eligible_drugs"] = pool.size();
  for (std::size_t v = 0; v < variants.size(); ++v) {
    json folds_doc = json::array();
    for (std::size_t k = 0; k < n_folds; ++k) {
      folds_doc.push_back({{"drug_id", held_out[k]},
                           {"fold_seed", derive_seed(cfg.seed, "fold", k)},
                           {"n_test", test_sizes[v * n_folds + k]},
                           {"pcc", optional_json(scores[v * n_folds + k])}});
    }
    doc["variants"][names[v]] = {{"data_sha256", inputs[v].data_hashes}, {"folds", folds_doc}};
  }
  guarded(ExitCode::kTraining, "lodo output", [&] {
    write_text_file(cfg.paths.out / "lodo_pcc.csv", lodo_pcc_csv(names, per_variant));
    write_text_file(cfg.paths.out / "lodo_gains.csv", lodo_gains_csv(gains, has_b));
    write_text_file(cfg.paths.out / "lodo_summary.json", dump(doc));
    return 0;
  });
  return dump(doc);
}

std::string cmd_report(const RunConfig& cfg, const std::vector<fs::path>& run_dirs_arg,
                       const ProgressFn& progress) {
  const std::vector<fs::path>& run_dirs = run_dirs_arg.empty() ? cfg.report_runs : run_dirs_arg;
  if (run_dirs.empty()) throw CommandError(ExitCode::kReport, "report: no run directories given");

  std::vector<std::pair<std::string, std::vector<EpochRecord>>> histories;
  std::vector<std::optional<double>> test_pcc;
  std::vector<fs::path> run_dirs_used;
  for (const auto& dir : run_dirs) {
    const fs::path file = dir / kHistoryFile;
    if (!fs::is_regular_file(file)) {
      throw CommandError(ExitCode::kReport,
                         fmt::format("report: missing history file {}", file.string()));
    }
    auto parsed = guarded(ExitCode::kReport, "report",
                          [&] { return parse_history_csv(read_text_file(file), file.string()); });
    if (parsed.size() != 1) {
      throw CommandError(ExitCode::kReport,
                         fmt::format("report: {} holds {} models, expected one", file.string(),
                                     parsed.size()));
    }
    for (const auto& [name, unused] : histories) {
      if (name == parsed.front().first) {
        throw CommandError(ExitCode::kReport,
                           fmt::format("report: model name {} appears in more than one run; set "
                                       "run.name to tell them apart",
                                       name));
      }
    }
    std::optional<double> pcc;
    const fs::path summary = dir / "eval_summary.json";
    if (fs::is_regular_file(summary)) {
      guarded(ExitCode::kReport, "report", [&] {
        const json s = json::parse(read_text_file(summary));
        if (s.contains("overall_pcc") && s["overall_pcc"].is_number()) {
          pcc = s["overall_pcc"].get<double>();
        }
        return 0;
      });
    }
    histories.push_back(std::move(parsed.front()));
    test_pcc.push_back(pcc);
    run_dirs_used.push_back(dir);
  }

  const StabilityTable table = guarded(ExitCode::kReport, "report", [&] {
    std::string names;
    for (std::size_t i = 0; i < histories.size(); ++i) {
      names += fmt::format("{}{} ({})", i ? ", " : "", histories[i].first, run_dirs_used[i].string());
    }
    try {
      return stability_report(histories);
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("runs [{}]: {}", names, e.what()));
    }
  });

  std::string comparison = "model,epochs,max_val_pcc,final_val_pcc,fluctuation,test_pcc\n";
  json doc;
  doc["command"] = "report";
  doc["epochs"] = table.epochs;
  for (std::size_t m = 0; m < table.summaries.size(); ++m) {
    const auto& s = table.summaries[m];
    comparison += fmt::format("{},{},{},{},{},{}\n", s.model, s.epochs, format_real(s.max_pcc),
                              format_real(s.final_pcc), format_real(s.fluctuation),
                              test_pcc[m] ? format_real(*test_pcc[m]) : std::string("NA"));
    doc["models"][s.model] = {{"epochs", s.epochs},
                              {"max_val_pcc", s.max_pcc},
                              {"final_val_pcc", s.final_pcc},
                              {"fluctuation", s.fluctuation},
                              {"test_pcc", optional_json(test_pcc[m])}};
  }
  guarded(ExitCode::kReport, "report output", [&] {
    write_text_file(cfg.paths.out / "stability.csv", stability_csv(table));
    write_text_file(cfg.paths.out / "stability_summary.csv", stability_summary_csv(table));
    write_text_file(cfg.paths.out / "comparison.csv", comparison);
    write_text_file(cfg.paths.out / "report_summary.json", dump(doc));
    return 0;
  });
  emit(progress, fmt::format("report: merged {} runs over {} epochs", histories.size(),
                             table.epochs.size()));
  return dump(doc);
}

}  // namespace drugresp
