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

#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "paranet/network.hpp"

namespace paranet {

/// Matrices beyond this condition number are treated as singular.
inline constexpr double kMaxConditionNumber = 1e12;

/// Mode-to-port coupling, H_jk = sqrt(eta_j^k).
struct PortMatrix {
    MatrixXd H;
    std::vector<std::string> mode_ids;
    std::vector<std::string> port_ids;
};

PortMatrix port_matrix(const ModeNetwork &network);

/// 2-norm condition number.
template <typename Derived>
double condition_number(const Eigen::MatrixBase<Derived> &m) {
    Eigen::JacobiSVD<typename Derived::PlainObject> svd(m);
    const auto &s = svd.singularValues();
    if (s.size() == 0) return 1.0;
    const double lo = std::abs(s(s.size() - 1));
    if (lo == 0.0) return std::numeric_limits<double>::infinity();
    return std::abs(s(0)) / lo;
}

/// S = i H^T M^-1 H - 1. Throws SingularMatrix when M is numerically
/// singular.
template <typename DerivedM, typename DerivedH>
MatrixC<typename Eigen::NumTraits<typename DerivedM::Scalar>::Real> scattering_from(
    const Eigen::MatrixBase<DerivedM> &M, const Eigen::MatrixBase<DerivedH> &H) {
    using Real = typename Eigen::NumTraits<typename DerivedM::Scalar>::Real;
    using C = Complex<Real>;
    if (!(condition_number(M) < kMaxConditionNumber))
        throw Error(Errc::SingularMatrix, "mode-coupling matrix is singular (gain divergence)");
    const MatrixC<Real> Hc = H.template cast<C>();
    const MatrixC<Real> X = M.eval().partialPivLu().solve(Hc);
    MatrixC<Real> S = C(0, 1) * (Hc.transpose() * X);
    S.diagonal().array() -= C(1);
    return S;
}

/// Full scattering matrix over every port (external and internal), in the
/// order of network.ports(). Rows and columns of conjugated modes relate
/// conjugate amplitudes.
MatrixXcd scattering_matrix(const ModeNetwork &network, const FrameAssignment &frame);

/// Restriction of a full S to the external ports.
MatrixXcd external_block(const ModeNetwork &network, const MatrixXcd &S);

enum class SweepAxis { Detuning, LoopPhase, EdgePhase };

struct ScatteringResult {
    SweepAxis axis_kind = SweepAxis::Detuning;
    std::vector<double> axis;       // rad/s for detuning, rad for phases
    std::vector<MatrixXcd> S;       // full port set; NaN where singular
    std::vector<bool> singular;
    std::vector<bool> stable;
    std::vector<std::string> port_ids;
    std::vector<bool> port_conjugated;
    std::vector<bool> port_external;

    std::size_t size() const { return axis.size(); }
    std::size_t port(std::string_view id) const;
    cplx at(std::size_t point, std::string_view out_port, std::string_view in_port) const;
};

/// Evenly spaced samples over [lo, hi].
std::vector<double> linspace(double lo, double hi, std::size_t n);

/// S versus probe detuning (rad/s). Points at a gain divergence are flagged
/// singular; `stable` reflects the free-oscillation test of the network.
ScatteringResult sweep_detuning(const ModeNetwork &network, std::string_view probe_mode,
                                double delta_min, double delta_max, std::size_t n_points);

/// Loop phase of a cycle listed as a mode traversal order: the argument of
/// the ordered product of coupling-matrix phase factors around it. For the
/// circulator cycle (a, b, c) this is phi_ab + phi_bc - phi_ac, for the
/// directional-amplifier cycle (a, c, b) it is phi_ab + phi_bc + phi_ac.
double loop_phase(const ModeNetwork &network, std::span<const std::string> cycle);

/// d(loop phase)/d(edge phase) for an edge on the cycle (+1 or -1).
int loop_phase_sensitivity(const ModeNetwork &network, std::span<const std::string> cycle,
                           std::string_view edge_id);

/// Varies the phase of one edge. With a cycle the axis is that cycle's loop
/// phase, otherwise the raw edge phase. Each point is checked for
/// stability.
ScatteringResult sweep_loop_phase(const ModeNetwork &network, std::string_view edge_id,
                                  double phase_min, double phase_max, std::size_t n_points,
                                  std::span<const std::string> cycle = {},
                                  std::string_view probe_mode = {}, double delta = 0.0);

/// Copy of `network` with one edge's phase replaced.
ModeNetwork with_edge_phase(const ModeNetwork &network, std::string_view edge_id, double phase);

}  // namespace paranet
