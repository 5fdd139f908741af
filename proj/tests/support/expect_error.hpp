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

#ifndef DRUGRESP_TESTS_SUPPORT_EXPECT_ERROR_HPP_
#define DRUGRESP_TESTS_SUPPORT_EXPECT_ERROR_HPP_

#include <gtest/gtest.h>

#include "drugresp/error.hpp"

// Asserts that `statement` throws drugresp::Error of the given kind.
#define EXPECT_ERROR_KIND(statement, expected_kind)                                   \
  do {                                                                                \
    try {                                                                             \
      statement;                                                                      \
      ADD_FAILURE() << "expected " #expected_kind " from: " #statement;               \
    } catch (const ::drugresp::Error& caught_error) {                                 \
      EXPECT_EQ(caught_error.kind(), expected_kind) << caught_error.what();           \
    }                                                                                 \
  } while (0)

#endif  // DRUGRESP_TESTS_SUPPORT_EXPECT_ERROR_HPP_
