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

#include "paranet/table.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

namespace paranet {

bool Table::has(std::string_view name) const {
    return std::find(headers.begin(), headers.end(), name) != headers.end();
}

const std::vector<double> &Table::column(std::string_view name) const {
    const auto it = std::find(headers.begin(), headers.end(), name);
    if (it == headers.end()) throw Error(Errc::ParseError, "missing column '" + std::string(name) + "'");
    return columns[static_cast<std::size_t>(it - headers.begin())];
}

namespace {

std::vector<std::string> split(const std::string &line) {
    const char sep = line.find(',') != std::string::npos   ? ','
                     : line.find('\t') != std::string::npos ? '\t'
                     : line.find(';') != std::string::npos  ? ';'
                                                            : ' ';
    std::vector<std::string> out;
    std::string field;
    auto flush = [&] {
        const auto b = field.find_first_not_of(" \t\r");
        const auto e = field.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : field.substr(b, e - b + 1));
        field.clear();
    };
    for (char ch : line) {
        if (ch == sep) {
            if (sep == ' ' && field.empty()) continue;
            flush();
        } else {
            field += ch;
        }
    }
    if (sep != ' ' || !field.empty()) flush();
    return out;
}

}  // namespace

Table read_table(std::istream &in, std::string_view source) {
    Table t;
    std::string line;
    std::size_t lineno = 0;
    auto where = [&] { return std::string(source) + ":" + std::to_string(lineno); };
    while (std::getline(in, line)) {
        ++lineno;
        const auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        auto fields = split(line);
        if (t.headers.empty()) {
            t.headers = std::move(fields);
            t.columns.resize(t.headers.size());
            continue;
        }
        if (fields.size() != t.headers.size())
            throw Error(Errc::ParseError, where() + ": expected " + std::to_string(t.headers.size()) +
                                              " fields, found " + std::to_string(fields.size()));
        for (std::size_t c = 0; c < fields.size(); ++c) {
            const std::string &f = fields[c];
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (ec != std::errc() || ptr != f.data() + f.size())
                throw Error(Errc::ParseError, where() + ": not a number: '" + f + "'");
            t.columns[c].push_back(v);
        }
    }
    if (t.headers.empty()) throw Error(Errc::ParseError, std::string(source) + ": no header row");
    return t;
}

Table read_table_file(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::IOError, "cannot open '" + path + "'", path);
    return read_table(in, path);
}

}  // namespace paranet
