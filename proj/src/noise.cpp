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

#include "paranet/noise.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

#include "paranet/scattering.hpp"

namespace paranet {

double thermal_occupation(double omega, double temperature) {
    if (!(omega > 0.0)) throw Error(Errc::InvalidArgument, "frequency must be positive");
    if (temperature < 0.0) throw Error(Errc::InvalidArgument, "temperature must be non-negative");
    if (temperature == 0.0) return 0.0;
    const double x = constants::kHbar * omega / (constants::kBoltzmann * temperature);
    return 1.0 / std::expm1(x);
}

InputCovariance InputCovariance::diagonal(const VectorXd &occupation, std::vector<int> signs) {
    if (static_cast<std::size_t>(occupation.size()) != signs.size())
        throw Error(Errc::InvalidArgument, "occupation and sign vectors differ in length");
    InputCovariance in;
    in.C = MatrixXcd::Zero(occupation.size(), occupation.size());
    for (Eigen::Index l = 0; l < occupation.size(); ++l) {
        if (!(occupation(l) >= 0.0)) throw Error(Errc::NonPSDInput, "negative bath occupation");
        in.C(l, l) = occupation(l) + (signs[l] < 0 ? 1.0 : 0.0);
    }
    in.signs = std::move(signs);
    return in;
}

InputCovariance InputCovariance::from_network(const ModeNetwork &network) {
    VectorXd n(network.num_ports());
    std::vector<int> signs;
    for (std::size_t l = 0; l < network.num_ports(); ++l) {
        const auto &p = network.ports()[l];
        n(l) = occupation(p.bath);
        signs.push_back(network.sign(network.mode_index(p.mode)));
    }
    return diagonal(n, std::move(signs));
}

void check_covariance(const MatrixXcd &C) {
    const double scale = std::max(1.0, C.cwiseAbs().maxCoeff());
    if ((C - C.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw Error(Errc::NonPSDInput, "input covariance is not Hermitian");
    Eigen::SelfAdjointEigenSolver<MatrixXcd> eig(C, Eigen::EigenvaluesOnly);
    if (eig.eigenvalues().minCoeff() < -1e-12 * scale)
        throw Error(Errc::NonPSDInput, "input covariance is not positive semidefinite");
}

namespace {

void check_shapes(const MatrixXcd &S, const InputCovariance &input) {
    if (S.rows() != S.cols() || S.cols() != input.C.rows() || input.C.rows() != input.C.cols() ||
        static_cast<std::size_t>(S.cols()) != input.signs.size())
        throw Error(Errc::InvalidArgument, "scattering matrix and covariance dimensions differ");
}

}  // namespace

VectorXd output_spectral_density(const MatrixXcd &S, const InputCovariance &input) {
    check_shapes(S, input);
    check_covariance(input.C);
    return propagate_covariance(S, input.C).diagonal().real();
}

VectorXd symmetrized_density(const MatrixXcd &S, const InputCovariance &input) {
    check_shapes(S, input);
    check_covariance(input.C);
    MatrixXcd C = input.C;
    for (std::size_t l = 0; l < input.signs.size(); ++l) C(l, l) += 0.5 * input.signs[l];
    return propagate_covariance(S, C).diagonal().real();
}

VectorXd symmetrized_density(const ModeNetwork &network, std::string_view probe_mode, double delta) {
    const auto probe = probe_mode.empty() ? std::size_t{0} : network.mode_index(probe_mode);
    const MatrixXcd S = scattering_matrix(network, assign_frame(network, probe, delta));
    return symmetrized_density(S, InputCovariance::from_network(network));
}

double added_noise_input_referred(double n_out, double gain) {
    if (!(gain > 1.0)) throw Error(Errc::GainTooSmall, "added noise needs a gain above unity");
    return n_out / gain - 0.5;
}

double return_noise_ratio(const ModeNetwork &network_on, const ModeNetwork &network_off, std::string_view port,
                          std::string_view probe_mode, double delta) {
    const auto on = symmetrized_density(network_on, probe_mode, delta);
    const auto off = symmetrized_density(network_off, probe_mode, delta);
    return on(network_on.port_index(port)) / off(network_off.port_index(port));
}

std::size_t NoiseResult::port(std::string_view id) const {
    for (std::size_t i = 0; i < port_ids.size(); ++i)
        if (port_ids[i] == id) return i;
    throw Error(Errc::InvalidArgument, "unknown port", std::string(id));
}

double NoiseResult::added_noise(std::size_t point, std::string_view out_port, std::string_view in_port) const {
    const auto o = port(out_port);
    return added_noise_input_referred(density.at(point)(o), power_gain.at(point)(o, port(in_port)));
}

NoiseResult noise_sweep(const ModeNetwork &network, std::string_view probe_mode, double delta_min,
                        double delta_max, std::size_t n_points) {
    NoiseResult r;
    for (const auto &p : network.ports()) r.port_ids.push_back(p.id);
    const auto input = InputCovariance::from_network(network);
    const auto probe = probe_mode.empty() ? std::size_t{0} : network.mode_index(probe_mode);
    const auto m = static_cast<Eigen::Index>(network.num_ports());
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (double d : linspace(delta_min, delta_max, n_points)) {
        r.axis.push_back(d);
        try {
            const MatrixXcd S = scattering_matrix(network, assign_frame(network, probe, d));
            r.density.push_back(symmetrized_density(S, input));
            r.power_gain.push_back(S.cwiseAbs2());
            r.singular.push_back(false);
        } catch (const Error &e) {
            if (e.code() != Errc::SingularMatrix) throw;
            r.density.push_back(VectorXd::Constant(m, nan));
            r.power_gain.push_back(MatrixXd::Constant(m, m, nan));
            r.singular.push_back(true);
        }
    }
    return r;
}

}  // namespace paranet
