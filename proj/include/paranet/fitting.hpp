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

// Least-squares fit of network parameters to measured scattering sweeps,
// using the general scattering path as the model.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "paranet/network.hpp"
#include "paranet/optimize.hpp"
#include "paranet/table.hpp"

namespace paranet {

/// One measured S_{out,in} trace. `axis` is the probe detuning in rad/s
/// relative to the reference network's probe mode frequency. Either
/// `magnitude` (linear |S|) or `values` (complex S) must be filled.
struct MeasuredTrace {
    std::string out_port;
    std::string in_port;
    std::vector<double> axis;
    std::vector<double> magnitude;
    std::vector<cplx> values;
    std::vector<double> sigma;  // optional per-point uncertainty
};

/// A free parameter. Names: "omega.<mode>", "kappa.<mode>" (rad/s),
/// "eta.<mode>", "beta.<edge>" (normalized magnitude), "phase.<edge>" (rad).
struct FitParameter {
    std::string name;
    double initial = 0.0;
    double lower = 0.0;
    double upper = 0.0;
};

struct FitProblem {
    ModeNetwork model;        // reference network; pumps are held fixed
    std::string probe_mode{};  // empty = first mode
    std::vector<MeasuredTrace> traces{};
    std::vector<FitParameter> parameters{};
    bool use_phase = false;   // fit Re/Im of complex data instead of |S|
    LmOptions options{};
};

struct FitResult {
    std::vector<std::string> names;
    VectorXd values;
    VectorXd std_error;
    VectorXd residual;
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    std::string status;
    std::size_t n_points = 0;
    std::optional<ModeNetwork> network;

    double value(std::string_view name) const;
    double error(std::string_view name) const;
};

/// Current value of a named parameter in `network`.
double parameter_value(const ModeNetwork &network, std::string_view name);

/// Copy of `network` with the named parameters replaced.
ModeNetwork apply_parameters(const ModeNetwork &network, const std::vector<std::string> &names,
                             const VectorXd &values);

/// Bounded Levenberg-Marquardt fit. Throws InvalidArgument for malformed
/// problems, DegenerateProblem and NonConvergence from the solver.
FitResult fit_sweep(const FitProblem &problem);

/// Builds traces from a table with an "axis_Hz" column (detuning in Hz) and
/// columns S_<out><in>_dB / _deg, _re / _im, or _mag. Port pairs are
/// resolved against `port_ids`; "S_<out>_<in>_..." is accepted as well.
std::vector<MeasuredTrace> traces_from_table(const Table &table, const std::vector<std::string> &port_ids);

}  // namespace paranet
