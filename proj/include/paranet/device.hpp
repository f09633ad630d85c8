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

// Physical-layer helpers: flux-tuning curves, pump-to-coupling conversion,
// pump-collision checks and shot-noise calibration of a measurement chain.

#include <span>
#include <string>
#include <vector>

#include "paranet/network.hpp"
#include "paranet/optimize.hpp"

namespace paranet {

struct FluxCoupling {
    double g = 0.0;               // rad/s
    bool opposite_slopes = false; // modes tune in opposite directions
};

/// g = (dPhi / 4) sqrt(|dw_j/dPhi * dw_k/dPhi|). Slopes in rad/s per flux
/// quantum, dPhi in flux quanta.
FluxCoupling coupling_from_flux(double flux_amplitude, double slope_j, double slope_k);

/// Tabulated mode frequencies versus reduced flux Phi/Phi_0.
struct FluxCurve {
    std::vector<double> flux;
    std::vector<std::string> mode_ids;
    MatrixXd omega;  // rows = flux samples, cols = modes (rad/s)

    /// Validates: >= 4 strictly increasing samples, finite values.
    void validate() const;
};

/// Monotone piecewise-cubic (Steffen) interpolant slopes dw_j/dPhi at
/// `flux`. Throws OutOfRange outside the sampled interval.
VectorXd flux_slopes(const FluxCurve &curve, double flux);

/// Interpolated mode frequencies at `flux`.
VectorXd flux_frequencies(const FluxCurve &curve, double flux);

struct Collision {
    std::string first;   // e.g. "a", "a+b", "b-a"
    std::string second;
    double first_freq = 0.0;
    double second_freq = 0.0;
    double separation = 0.0;
};

/// Pairs among the mode frequencies, sum frequencies (including 2w_j) and
/// difference frequencies closer than guard_factor * max kappa. Sorted by
/// separation, then labels.
std::vector<Collision> collision_check(std::span<const Mode> modes, double guard_factor = 3.0);

/// Symmetrized noise emitted by a voltage-biased tunnel junction into a
/// matched line, in quanta: N = N+ + N-, with
/// N+- = (k_B T / 2 hbar w) x coth x and x = (eV +- hbar w) / (2 k_B T).
double shot_noise_psd(double voltage, double temperature, double omega);

struct CalibrationGuess {
    double gain = 1.0;
    double n_add = 1.0;
    double temperature = 0.05;  // K
};

struct CalibrationRecord {
    double omega = 0.0;
    double gain = 0.0;
    double n_add = 0.0;
    double temperature = 0.0;
    double gain_error = 0.0;
    double n_add_error = 0.0;
    double temperature_error = 0.0;
    double residual_norm = 0.0;  // relative residuals
    int iterations = 0;
};

/// Fits N_meas = G (N(V, T) + n_add) to measured noise power versus bias
/// voltage, on relative residuals.
CalibrationRecord calibrate_system(std::span<const double> voltage, std::span<const double> n_meas,
                                   double omega, const CalibrationGuess &guess,
                                   const LmOptions &options = {});

}  // namespace paranet
