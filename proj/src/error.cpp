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

#include "drugresp/error.hpp"

namespace drugresp {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kShape: return "shape";
    case ErrorKind::kNumeric: return "numeric";
    case ErrorKind::kEmptyPool: return "empty-pool";
    case ErrorKind::kBatchSize: return "batch-size";
    case ErrorKind::kParameter: return "parameter";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kContract: return "contract";
    case ErrorKind::kFormat: return "format";
    case ErrorKind::kConsistency: return "consistency";
    case ErrorKind::kIndex: return "index";
    case ErrorKind::kCapacity: return "capacity";
    case ErrorKind::kParse: return "parse";
    case ErrorKind::kDuplication: return "duplication";
    case ErrorKind::kNormalization: return "normalization";
    case ErrorKind::kDimension: return "dimension";
    case ErrorKind::kEmptySet: return "empty-set";
    case ErrorKind::kSchema: return "schema";
    case ErrorKind::kValue: return "value";
    case ErrorKind::kSplit: return "split";
    case ErrorKind::kDivergence: return "divergence";
    case ErrorKind::kComparison: return "comparison";
    case ErrorKind::kMerge: return "merge";
    case ErrorKind::kCheckpoint: return "checkpoint";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

}  // namespace drugresp
