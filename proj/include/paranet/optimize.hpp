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

// Bounded Levenberg-Marquardt least squares with central-difference
// Jacobians. Shared by the sweep fitter and the shot-noise calibration.

#include <functional>
#include <string>
#include <vector>

#include "paranet/core.hpp"

namespace paranet {

/// Fills `r` with the residuals at `x`; returns false when the model
/// cannot be evaluated there.
using ResidualFunction = std::function<bool(const VectorXd &x, VectorXd &r)>;

struct LmOptions {
    int max_iterations = 500;
    double fd_step = 1e-7;         // relative finite-difference step
    double ftol = 1e-14;           // relative cost reduction
    double xtol = 1e-13;           // relative step size
    double gtol = 1e-14;           // scaled gradient
    double initial_lambda = 1e-3;
};

struct LmResult {
    VectorXd x;
    VectorXd residual;
    VectorXd std_error;  // sqrt(diag(s^2 (J^T J)^-1)), NaN without redundancy
    MatrixXd jacobian;
    double cost = 0.0;   // ||r||^2 / 2
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;
    std::string status;
};

/// Minimizes ||r(x)||^2 within [lower, upper] (projected steps). Throws
/// DegenerateProblem when a parameter has no influence on the residuals and
/// NonConvergence when the iteration cap is reached.
LmResult levenberg_marquardt(const ResidualFunction &residual, VectorXd x0, const VectorXd &lower,
                             const VectorXd &upper, const LmOptions &options = {},
                             const std::vector<std::string> &names = {});

}  // namespace paranet
