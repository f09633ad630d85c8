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

// Free-oscillation analysis. det M(delta) is a degree-n polynomial in the
// probe detuning; a root with positive imaginary part is a growing solution.

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "paranet/network.hpp"

namespace paranet {

struct StabilityReport {
    std::vector<cplx> roots;  // probe detunings delta (rad/s) with det M = 0
    bool stable = true;
    double margin = 0.0;      // min over roots of -Im(delta) / max kappa
};

/// Coefficients c_0..c_n of det M(delta) in the normalized variable
/// u = delta / max_kappa (ascending powers).
VectorXcd determinant_polynomial(const ModeNetwork &network, std::string_view probe_mode = {});

StabilityReport determinant_roots(const ModeNetwork &network, std::string_view probe_mode = {});

struct ThresholdResult {
    double scale = 0.0;           // critical multiplier of the selected |g|
    double stable_bound = 0.0;    // largest scale known stable
    double unstable_bound = 0.0;  // smallest scale known unstable
    int iterations = 0;
};

/// Scales the magnitudes of the selected edges (all edges when empty) and
/// bisects for the onset of free oscillation, to 1e-9 relative precision.
/// Throws NoThresholdFound when stable up to a scale of `scale_cap`.
ThresholdResult oscillation_threshold(const ModeNetwork &network,
                                      std::span<const std::string> edge_ids = {},
                                      std::string_view probe_mode = {}, double scale_cap = 10.0);

/// Copy of `network` with the selected edge magnitudes multiplied by `scale`.
ModeNetwork scale_edges(const ModeNetwork &network, std::span<const std::string> edge_ids, double scale);

}  // namespace paranet
