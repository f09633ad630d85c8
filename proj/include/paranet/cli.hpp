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

// Config-driven front end. A run reads one YAML file with `network`,
// `task` and `output` sections, executes the task and writes the result
// atomically.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "paranet/network.hpp"
#include "paranet/scattering.hpp"

namespace YAML {
class Node;
}

namespace paranet::cli {

enum ExitCode : int { kSuccess = 0, kValidationError = 1, kNumericalFailure = 2 };

struct RunOptions {
    std::string config_path;
    std::optional<std::string> output;   // "-" for stdout
    std::optional<std::string> format;   // csv | json | yaml
    std::optional<std::size_t> points;
    std::vector<std::string> overrides;  // dotted.key=value
    bool quiet = false;
};

/// Executes one run; diagnostics go to `err`, results without an output
/// path go to `out`.
int run(const RunOptions &options, std::ostream &out, std::ostream &err);

/// Applies "a.b.c=value" to a YAML tree. Sequence elements are addressed by
/// index or by their `id` field.
void apply_override(YAML::Node &root, const std::string &assignment);

/// Parses the `network` section.
ModeNetwork parse_network(const YAML::Node &network, const std::string &source = "<config>");

/// CSV with delta_Hz (or phase_deg) then S_<out><in>_dB, S_<out><in>_deg for
/// every ordered pair of external ports; 12 significant digits.
std::string scattering_csv(const ScatteringResult &result);

/// JSON document with "schema": "paranet/1"; complex values as [re, im].
std::string scattering_json(const ScatteringResult &result);

/// Pasteable YAML `edges:` block.
std::string edges_yaml(const std::vector<CouplingEdge> &edges);

/// Writes via a temporary file in the same directory and renames it.
void write_atomic(const std::string &path, const std::string &content);

}  // namespace paranet::cli
