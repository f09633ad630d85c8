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

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "paranet/network.hpp"
#include "paranet/stability.hpp"

namespace paranet::testing {

inline Mode mode_hz(const std::string &id, double f_ghz, double kappa_mhz, double eta = 1.0) {
    return Mode::from_hz(id, f_ghz * 1e9, eta * kappa_mhz * 1e6, (1.0 - eta) * kappa_mhz * 1e6);
}

inline CouplingEdge edge_beta(const std::vector<Mode> &modes, std::size_t j, std::size_t k, CouplingKind kind,
                              double beta, double phase = 0.0) {
    CouplingEdge e;
    e.from = modes[j].id;
    e.to = modes[k].id;
    e.kind = kind;
    e.magnitude = 2.0 * beta * std::sqrt(modes[j].kappa() * modes[k].kappa());
    e.phase = phase;
    e.pump_freq = ideal_pump(kind, modes[j].omega, modes[k].omega);
    e.id = e.from + e.to;
    return e;
}

/// Modes a, b, c at the reference bias point with kappa/2pi = 25, 36, 60 MHz.
inline std::vector<Mode> reference_modes(double eta = 1.0) {
    return {mode_hz("a", 4.155, 25.0, eta), mode_hz("b", 5.756, 36.0, eta), mode_hz("c", 7.915, 60.0, eta)};
}

inline ModeNetwork two_mode(CouplingKind kind, double beta, double eta_a = 1.0, double eta_b = 1.0,
                            double phase = 0.0) {
    std::vector<Mode> m{mode_hz("a", 4.155, 25.0, eta_a), mode_hz("b", 5.756, 36.0, eta_b)};
    return build_network(m, {edge_beta(m, 0, 1, kind, beta, phase)});
}

struct RandomNetworkOptions {
    std::size_t min_modes = 1;
    std::size_t max_modes = 4;
    bool conversion_only = false;
    bool lossless = true;
    double max_beta = 0.6;
    double edge_probability = 0.7;
};

/// Random network with a random conjugation signature: pairs with equal
/// signs get conversion edges, others amplification edges. Rejects
/// draws that are unstable.
inline ModeNetwork random_network(std::mt19937_64 &rng, const RandomNetworkOptions &opt = {}) {
    std::uniform_int_distribution<std::size_t> count(opt.min_modes, opt.max_modes);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    while (true) {
        const std::size_t n = count(rng);
        std::vector<Mode> modes;
        std::vector<int> sign;
        for (std::size_t j = 0; j < n; ++j) {
            const double eta = opt.lossless ? 1.0 : 0.5 + 0.5 * unit(rng);
            modes.push_back(mode_hz(std::string(1, char('a' + j)), 3.0 + 1.7 * j + 0.5 * unit(rng),
                                    10.0 + 60.0 * unit(rng), eta));
            sign.push_back(opt.conversion_only || unit(rng) < 0.5 ? 1 : -1);
        }
        std::vector<CouplingEdge> edges;
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t k = j + 1; k < n; ++k) {
                if (unit(rng) > opt.edge_probability) continue;
                const auto kind = sign[j] == sign[k] ? CouplingKind::Conversion : CouplingKind::Amplification;
                const double cap = kind == CouplingKind::Amplification ? 0.5 * opt.max_beta : opt.max_beta;
                edges.push_back(edge_beta(modes, j, k, kind, cap * unit(rng), (2.0 * unit(rng) - 1.0) * kPi));
            }
        auto net = build_network(modes, edges);
        if (determinant_roots(net).margin > 0.02) return net;
    }
}

}  // namespace paranet::testing
