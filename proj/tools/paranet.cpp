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

#include <iostream>

#include <CLI11.hpp>

#include "paranet/cli.hpp"

int main(int argc, char **argv) {
    CLI::App app{"paranet: scattering, noise and stability of parametrically coupled mode networks"};
    paranet::cli::RunOptions opt;
    std::size_t points = 0;
    std::string output, format;

    app.add_option("-c,--config", opt.config_path, "YAML run configuration")->required()->check(CLI::ExistingFile);
    app.add_option("-o,--output", output, "Output path ('-' for stdout)");
    app.add_option("-f,--format", format, "Output format")->check(CLI::IsMember({"csv", "json", "yaml"}));
    auto *points_opt = app.add_option("-n,--points", points, "Number of sweep points");
    app.add_option("--override", opt.overrides, "Config override, dotted.key=value (repeatable)");
    app.add_flag("-q,--quiet", opt.quiet, "Suppress informational messages");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : paranet::cli::kValidationError;
    }
    if (!output.empty()) opt.output = output;
    if (!format.empty()) opt.format = format;
    if (*points_opt) opt.points = points;
    return paranet::cli::run(opt, std::cout, std::cerr);
}
