// Copyright 2026 The Paranet Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Minimal delimited-text tables: one header row, numeric columns, comma,
// tab, semicolon or whitespace separated. Lines starting with '#' are
// skipped.

#include <istream>
#include <string>
#include <string_view>
#include <vector>

#include "paranet/core.hpp"

namespace paranet {

struct Table {
    std::vector<std::string> headers;
    std::vector<std::vector<double>> columns;

    std::size_t rows() const { return columns.empty() ? 0 : columns.front().size(); }
    bool has(std::string_view name) const;
    const std::vector<double> &column(std::string_view name) const;
};

Table read_table(std::istream &in, std::string_view source = "<stream>");
Table read_table_file(const std::string &path);

}  // namespace paranet
