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

#ifndef DRUGRESP_ERROR_HPP_
#define DRUGRESP_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace drugresp {

// Categories of failure raised by the library. Callers branch on the kind;
// the message carries file/row/shape context for humans.
enum class ErrorKind {
  kShape,
  kNumeric,
  kEmptyPool,
  kBatchSize,
  kParameter,
  kDomain,
  kContract,
  kFormat,
  kConsistency,
  kIndex,
  kCapacity,
  kParse,
  kDuplication,
  kNormalization,
  kDimension,
  kEmptySet,
  kSchema,
  kValue,
  kSplit,
  kDivergence,
  kComparison,
  kMerge,
  kCheckpoint,
  kConfig,
  kIo,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace drugresp

#endif  // DRUGRESP_ERROR_HPP_
