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

#include "paranet/tuning.hpp"

#include <array>
#include <cmath>

namespace paranet {

const char *to_string(Behavior behavior) {
    switch (behavior) {
    case Behavior::Converter: return "converter";
    case Behavior::Circulator: return "circulator";
    case Behavior::DirectionalAmplifier: return "directional-amplifier";
    }
    return "?";
}

double directional_amplifier_beta(double gain_db) {
    if (!(gain_db >= 0.0) || !std::isfinite(gain_db))
        throw Error(Errc::InvalidArgument, "amplifier gain must be a finite, non-negative dB value");
    const double root_g = std::pow(10.0, gain_db / 20.0);
    return 0.5 * std::sqrt((root_g - 1.0) / (root_g + 1.0));
}

namespace {

CouplingEdge make_edge(const Mode &j, const Mode &k, CouplingKind kind, double beta, double phase) {
    CouplingEdge e;
    e.from = j.id;
    e.to = k.id;
    e.kind = kind;
    e.magnitude = 2.0 * beta * std::sqrt(j.kappa() * k.kappa());
    e.phase = phase;
    e.pump_freq = ideal_pump(kind, j.omega, k.omega);
    e.id = j.id + k.id;
    return e;
}

const Mode &pick(const std::vector<Mode> &modes, const TuneTarget &target, std::size_t i) {
    if (target.modes.empty()) return modes.at(i);
    for (const auto &m : modes)
        if (m.id == target.modes[i]) return m;
    throw Error(Errc::UnknownMode, "tuning target names unknown mode '" + target.modes[i] + "'", target.modes[i]);
}

}  // namespace

std::vector<CouplingEdge> tune(const std::vector<Mode> &modes, const TuneTarget &target) {
    const std::size_t need = target.behavior == Behavior::Converter ? 2 : 3;
    if ((target.modes.empty() ? modes.size() : target.modes.size()) < need ||
        (!target.modes.empty() && target.modes.size() != need))
        throw Error(Errc::InvalidArgument, std::string(to_string(target.behavior)) + " needs exactly " +
                                               std::to_string(need) + " modes");
    for (std::size_t i = 0; i < need; ++i)
        if (!(pick(modes, target, i).kappa() > 0.0))
            throw Error(Errc::InvalidArgument, "tuning needs positive linewidths");

    const double s = target.direction == Direction::Forward ? 1.0 : -1.0;
    const Mode &a = pick(modes, target, 0);
    const Mode &b = pick(modes, target, 1);
    switch (target.behavior) {
    case Behavior::Converter:
        return {make_edge(a, b, CouplingKind::Conversion, 0.5, 0.0)};
    case Behavior::Circulator: {
        const Mode &c = pick(modes, target, 2);
        return {make_edge(a, b, CouplingKind::Conversion, 0.5, s * kPi / 2),
                make_edge(b, c, CouplingKind::Conversion, 0.5, s * kPi / 2),
                make_edge(a, c, CouplingKind::Conversion, 0.5, -s * kPi / 2)};
    }
    case Behavior::DirectionalAmplifier: {
        const Mode &c = pick(modes, target, 2);
        const double x = directional_amplifier_beta(target.gain_db);
        return {make_edge(a, b, CouplingKind::Amplification, x, -s * kPi / 2),
                make_edge(b, c, CouplingKind::Amplification, x, s * kPi / 2),
                make_edge(a, c, CouplingKind::Conversion, 0.5, -s * kPi / 2)};
    }
    }
    return {};
}

ModeNetwork tuned_network(const std::vector<Mode> &modes, const TuneTarget &target) {
    return build_network(modes, tune(modes, target));
}

cplx isolation_condition(cplx beta_ab, cplx delta_c, Behavior kind) {
    switch (kind) {
    case Behavior::Circulator: return beta_ab * delta_c;
    case Behavior::DirectionalAmplifier: return -beta_ab * delta_c;
    case Behavior::Converter: break;
    }
    throw Error(Errc::InvalidArgument, "isolation condition applies to three-mode loops only");
}

}  // namespace paranet
