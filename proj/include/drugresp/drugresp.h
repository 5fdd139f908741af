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

#ifndef DRUGRESP_DRUGRESP_H_
#define DRUGRESP_DRUGRESP_H_

#include <stddef.h>

#if defined(_WIN32)
#if defined(DRUGRESP_BUILDING_LIBRARY)
#define DRUGRESP_API __declspec(dllexport)
#else
#define DRUGRESP_API __declspec(dllimport)
#endif
#else
#define DRUGRESP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes double as the command-line exit codes. */
typedef enum drugresp_status {
  DRUGRESP_OK = 0,
  DRUGRESP_ERR_USAGE = 1,
  DRUGRESP_ERR_INGEST = 2,
  DRUGRESP_ERR_TRAINING = 3,
  DRUGRESP_ERR_EVAL = 4,
  DRUGRESP_ERR_REPORT = 5,
  DRUGRESP_ERR_INTERNAL = 70
} drugresp_status;

/* Holds one run configuration plus the outcome of the last call. */
typedef struct drugresp_session drugresp_session;

/* Receives one progress line; `line` is valid only during the call. */
typedef void (*drugresp_progress_fn)(const char* line, void* user_data);

DRUGRESP_API const char* drugresp_version(void);

/* Returns NULL only when memory is exhausted. */
DRUGRESP_API drugresp_session* drugresp_session_create(void);
DRUGRESP_API void drugresp_session_destroy(drugresp_session* session);

/* Replaces the session config with the contents of an INI-style file. */
DRUGRESP_API drugresp_status drugresp_load_config(drugresp_session* session, const char* path);

/* Overrides one "section.key" setting, e.g. ("run.seed", "7"). */
DRUGRESP_API drugresp_status drugresp_set(drugresp_session* session, const char* key,
                                          const char* value);

DRUGRESP_API void drugresp_set_progress(drugresp_session* session, drugresp_progress_fn fn,
                                        void* user_data);

DRUGRESP_API drugresp_status drugresp_ingest(drugresp_session* session);
DRUGRESP_API drugresp_status drugresp_train(drugresp_session* session);
/* `checkpoint` may be NULL for <out>/checkpoint.txt. */
DRUGRESP_API drugresp_status drugresp_eval(drugresp_session* session, const char* checkpoint);
DRUGRESP_API drugresp_status drugresp_lodo(drugresp_session* session);
/* With n_runs == 0 the run list comes from the config's report.runs. */
DRUGRESP_API drugresp_status drugresp_report(drugresp_session* session,
                                             const char* const* run_dirs, size_t n_runs);

/* Message of the last failed call, or "" after a success. Owned by the session. */
DRUGRESP_API const char* drugresp_last_error(const drugresp_session* session);
/* JSON summary of the last successful command, or "". Owned by the session. */
DRUGRESP_API const char* drugresp_last_summary(const drugresp_session* session);

/* Pearson correlation of two length-n arrays. *defined is set to 0 when the
 * correlation is undefined (n < 2 or a constant input), in which case *out is
 * left untouched. */
DRUGRESP_API drugresp_status drugresp_pearson(const double* x, const double* y, size_t n,
                                              double* out, int* defined);

#ifdef __cplusplus
}
#endif

#endif /* DRUGRESP_DRUGRESP_H_ */
