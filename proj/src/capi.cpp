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

#include "drugresp/drugresp.h"

#include <new>
#include <span>
#include <string>
#include <vector>

#include "drugresp/commands.hpp"
#include "drugresp/config.hpp"
#include "drugresp/error.hpp"
#include "drugresp/metrics.hpp"

struct drugresp_session {
  drugresp::RunConfig config;
  std::string last_error;
  std::string last_summary;
  drugresp_progress_fn progress = nullptr;
  void* progress_user = nullptr;
};

namespace {

drugresp_status to_status(drugresp::ExitCode code) {
  return static_cast<drugresp_status>(static_cast<int>(code));
}

// Runs `body`, records its summary or error on the session, and maps
// exceptions to status codes.
template <class F>
drugresp_status run(drugresp_session* s, drugresp_status config_status, F&& body) {
  if (s == nullptr) return DRUGRESP_ERR_USAGE;
  s->last_error.clear();
  try {
    s->last_summary = body();
    return DRUGRESP_OK;
  } catch (const drugresp::CommandError& e) {
    s->last_error = e.what();
    return to_status(e.code());
  } catch (const drugresp::Error& e) {
    s->last_error = e.what();
    return config_status;
  } catch (const std::bad_alloc&) {
    s->last_error = "out of memory";
  } catch (const std::exception& e) {
    s->last_error = e.what();
  } catch (...) {
    s->last_error = "unknown failure";
  }
  return DRUGRESP_ERR_INTERNAL;
}

drugresp::ProgressFn progress_of(const drugresp_session* s) {
  if (s->progress == nullptr) return {};
  return [fn = s->progress, user = s->progress_user](std::string_view line) {
    const std::string text(line);
    fn(text.c_str(), user);
  };
}

}  // namespace

extern "C" {

const char* drugresp_version(void) { return "0.1.0"; }

drugresp_session* drugresp_session_create(void) {
  return new (std::nothrow) drugresp_session();
}

void drugresp_session_destroy(drugresp_session* session) { delete session; }

drugresp_status drugresp_load_config(drugresp_session* session, const char* path) {
  return run(session, DRUGRESP_ERR_USAGE, [&] {
    if (path == nullptr) throw drugresp::Error(drugresp::ErrorKind::kConfig, "config path is null");
    session->config = drugresp::load_run_config(path);
    return std::string();
  });
}

drugresp_status drugresp_set(drugresp_session* session, const char* key, const char* value) {
  return run(session, DRUGRESP_ERR_USAGE, [&] {
    if (key == nullptr || value == nullptr) {
      throw drugresp::Error(drugresp::ErrorKind::kConfig, "setting key and value must be non-null");
    }
    drugresp::apply_setting(session->config, key, value);
    return std::string();
  });
}

void drugresp_set_progress(drugresp_session* session, drugresp_progress_fn fn, void* user_data) {
  if (session == nullptr) return;
  session->progress = fn;
  session->progress_user = user_data;
}

drugresp_status drugresp_ingest(drugresp_session* session) {
  return run(session, DRUGRESP_ERR_INGEST,
             [&] { return drugresp::cmd_ingest(session->config, progress_of(session)); });
}

drugresp_status drugresp_train(drugresp_session* session) {
  return run(session, DRUGRESP_ERR_TRAINING,
             [&] { return drugresp::cmd_train(session->config, progress_of(session)); });
}

drugresp_status drugresp_eval(drugresp_session* session, const char* checkpoint) {
  return run(session, DRUGRESP_ERR_EVAL, [&] {
    return drugresp::cmd_eval(session->config, checkpoint ? checkpoint : "",
                              progress_of(session));
  });
}

drugresp_status drugresp_lodo(drugresp_session* session) {
  return run(session, DRUGRESP_ERR_TRAINING,
             [&] { return drugresp::cmd_lodo(session->config, progress_of(session)); });
}

drugresp_status drugresp_report(drugresp_session* session, const char* const* run_dirs,
                                size_t n_runs) {
  return run(session, DRUGRESP_ERR_REPORT, [&] {
    std::vector<std::filesystem::path> dirs;
    for (size_t i = 0; i < n_runs; ++i) {
      if (run_dirs == nullptr || run_dirs[i] == nullptr) {
        throw drugresp::CommandError(drugresp::ExitCode::kUsage, "run directory is null");
      }
      dirs.emplace_back(run_dirs[i]);
    }
    return drugresp::cmd_report(session->config, dirs, progress_of(session));
  });
}

const char* drugresp_last_error(const drugresp_session* session) {
  return session ? session->last_error.c_str() : "null session";
}

const char* drugresp_last_summary(const drugresp_session* session) {
  return session ? session->last_summary.c_str() : "";
}

drugresp_status drugresp_pearson(const double* x, const double* y, size_t n, double* out,
                                 int* defined) {
  if ((n > 0 && (x == nullptr || y == nullptr)) || out == nullptr || defined == nullptr) {
    return DRUGRESP_ERR_USAGE;
  }
  try {
    const auto r = drugresp::pearson(std::span<const double>(x, n), std::span<const double>(y, n));
    *defined = r.has_value() ? 1 : 0;
    if (r) *out = *r;
    return DRUGRESP_OK;
  } catch (...) {
    return DRUGRESP_ERR_INTERNAL;
  }
}

}  // extern "C"
