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

#ifndef DRUGRESP_SRC_CSV_HPP_
#define DRUGRESP_SRC_CSV_HPP_

// Minimal comma-separated text helpers shared by the loaders. Fields never
// contain quoted commas in any of the supported formats.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace drugresp::csv {

struct Line {
  std::size_t number;  // 1-based line number in the file
  std::string text;
};

// Non-blank lines with trailing '\r' removed. Throws kIo if unreadable.
std::vector<Line> read_lines(const std::filesystem::path& path);

std::vector<std::string_view> split(std::string_view line, char sep = ',');

std::string_view trim(std::string_view s);

std::optional<double> to_double(std::string_view field);
std::optional<long long> to_integer(std::string_view field);

// Shortest text that round-trips to the same double.
std::string format_double(double v);

}  // namespace drugresp::csv

#endif  // DRUGRESP_SRC_CSV_HPP_
