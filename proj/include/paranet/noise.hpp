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

// Gaussian noise propagation through a scattering matrix. Densities are in
// quanta (photons per second per hertz). For a port carrying the conjugate
// amplitude the ordered correlator is <a a^dag> = n + 1.

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "paranet/network.hpp"

namespace paranet {

/// Bose occupation 1 / (exp(hbar w / k_B T) - 1); zero at T = 0.
double thermal_occupation(double omega, double temperature);

struct InputCovariance {
    MatrixXcd C;             // <A_in^dag A_in^T>
    std::vector<int> signs;  // +1 plain port, -1 conjugated port

    /// Diagonal covariance from each port's bath and conjugation.
    static InputCovariance from_network(const ModeNetwork &network);

    /// Diagonal covariance from explicit occupations.
    static InputCovariance diagonal(const VectorXd &occupation, std::vector<int> signs);
};

/// Raw propagated covariance S^* C S^T.
template <typename DerivedS, typename DerivedC>
auto propagate_covariance(const Eigen::MatrixBase<DerivedS> &S, const Eigen::MatrixBase<DerivedC> &C) {
    return (S.conjugate() * C * S.transpose()).eval();
}

/// Throws NonPSDInput unless C is Hermitian and positive semidefinite.
void check_covariance(const MatrixXcd &C);

/// Per-port output density N = diag(S^* C S^T).
VectorXd output_spectral_density(const MatrixXcd &S, const InputCovariance &input);

/// Symmetrized density (N[w] + N[-w]) / 2, i.e. diag(S^* (C + diag(s)/2) S^T).
VectorXd symmetrized_density(const MatrixXcd &S, const InputCovariance &input);

/// Symmetrized density over all ports of `network` with the probe at
/// w_probe + delta and the port baths of the network.
VectorXd symmetrized_density(const ModeNetwork &network, std::string_view probe_mode, double delta);

/// n_add = N_out / G - 1/2. Throws GainTooSmall for G <= 1.
double added_noise_input_referred(double n_out, double gain);

/// N_on / N_off at one port, both networks probed at the same point.
double return_noise_ratio(const ModeNetwork &network_on, const ModeNetwork &network_off,
                          std::string_view port, std::string_view probe_mode = {}, double delta = 0.0);

struct NoiseResult {
    std::vector<double> axis;        // probe detuning, rad/s
    std::vector<std::string> port_ids;
    std::vector<VectorXd> density;   // symmetrized, per port; NaN where singular
    std::vector<MatrixXd> power_gain;  // |S_kl|^2
    std::vector<bool> singular;

    std::size_t size() const { return axis.size(); }
    std::size_t port(std::string_view id) const;

    /// Input-referred added noise for the pair (in -> out) at one point.
    double added_noise(std::size_t point, std::string_view out_port, std::string_view in_port) const;
};

NoiseResult noise_sweep(const ModeNetwork &network, std::string_view probe_mode, double delta_min,
                        double delta_max, std::size_t n_points);

}  // namespace paranet
