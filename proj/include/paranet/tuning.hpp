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

// Pump settings for the ideal converter, circulator and directional
// amplifier operating points.

#include <string>
#include <vector>

#include "paranet/network.hpp"

namespace paranet {

enum class Behavior { Converter, Circulator, DirectionalAmplifier };
enum class Direction { Forward, Reverse };

const char *to_string(Behavior behavior);

struct TuneTarget {
    Behavior behavior = Behavior::Converter;
    Direction direction = Direction::Forward;
    double gain_db = 0.0;            // forward power gain (directional amplifier)
    std::vector<std::string> modes;  // (a, b) or (a, b, c); empty = first modes
};

/// Normalized amplification strength |beta_ab| = |beta_bc| giving power gain
/// G on the matched directional amplifier.
double directional_amplifier_beta(double gain_db);

/// Edges realizing `target` between the listed modes, with ideal pump
/// frequencies and g = 2 |beta| sqrt(kappa_j kappa_k).
///
///   Converter             a->b conversion, |beta| = 1/2, phase 0
///   Circulator            ab, bc, ac conversion, |beta| = 1/2,
///                         phases (pi/2, pi/2, -pi/2), negated in reverse
///   DirectionalAmplifier  ab, bc amplification and ac conversion,
///                         beta_ac = 1/2, phases (-pi/2, pi/2, -pi/2),
///                         negated in reverse
std::vector<CouplingEdge> tune(const std::vector<Mode> &modes, const TuneTarget &target);

/// Network over `modes` carrying the tuned edges.
ModeNetwork tuned_network(const std::vector<Mode> &modes, const TuneTarget &target);

/// Required beta_ac conj(beta_bc) for zero transmission b -> a:
/// beta_ab Delta_c (circulator) or -beta_ab Delta_c (directional amplifier).
cplx isolation_condition(cplx beta_ab, cplx delta_c, Behavior kind);

}  // namespace paranet
