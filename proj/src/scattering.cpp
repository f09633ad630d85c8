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

#include "paranet/scattering.hpp"

#include <cmath>
#include <limits>

#include "paranet/stability.hpp"

namespace paranet {

PortMatrix port_matrix(const ModeNetwork &network) {
    PortMatrix pm;
    const auto n = static_cast<Eigen::Index>(network.num_modes());
    const auto m = static_cast<Eigen::Index>(network.num_ports());
    pm.H = MatrixXd::Zero(n, m);
    for (const auto &mode : network.modes()) pm.mode_ids.push_back(mode.id);
    for (Eigen::Index k = 0; k < m; ++k) {
        const auto &port = network.ports()[k];
        const auto j = network.mode_index(port.mode);
        pm.H(j, k) = std::sqrt(port.rate / network.modes()[j].kappa());
        pm.port_ids.push_back(port.id);
    }
    return pm;
}

MatrixXcd scattering_matrix(const ModeNetwork &network, const FrameAssignment &frame) {
    return scattering_from(coupling_matrix(network, frame), port_matrix(network).H);
}

MatrixXcd external_block(const ModeNetwork &network, const MatrixXcd &S) {
    const auto ext = network.external_ports();
    const auto m = static_cast<Eigen::Index>(ext.size());
    MatrixXcd out(m, m);
    for (Eigen::Index r = 0; r < m; ++r)
        for (Eigen::Index c = 0; c < m; ++c) out(r, c) = S(ext[r], ext[c]);
    return out;
}

std::size_t ScatteringResult::port(std::string_view id) const {
    for (std::size_t i = 0; i < port_ids.size(); ++i)
        if (port_ids[i] == id) return i;
    throw Error(Errc::InvalidArgument, "unknown port", std::string(id));
}

cplx ScatteringResult::at(std::size_t point, std::string_view out_port, std::string_view in_port) const {
    return S.at(point)(port(out_port), port(in_port));
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
    std::vector<double> v(n);
    if (n == 1) {
        v[0] = lo;
        return v;
    }
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * double(i) / double(n - 1);
    if (n > 1) v.back() = hi;
    return v;
}

namespace {

ScatteringResult empty_result(const ModeNetwork &network, SweepAxis kind) {
    ScatteringResult r;
    r.axis_kind = kind;
    for (const auto &p : network.ports()) {
        r.port_ids.push_back(p.id);
        r.port_conjugated.push_back(network.conjugated(network.mode_index(p.mode)));
        r.port_external.push_back(p.role == PortRole::External);
    }
    return r;
}

void push_point(ScatteringResult &r, const ModeNetwork &network, const FrameAssignment &frame, double x,
                bool stable) {
    const auto m = static_cast<Eigen::Index>(network.num_ports());
    r.axis.push_back(x);
    r.stable.push_back(stable);
    try {
        r.S.push_back(scattering_matrix(network, frame));
        r.singular.push_back(false);
    } catch (const Error &e) {
        if (e.code() != Errc::SingularMatrix) throw;
        const double nan = std::numeric_limits<double>::quiet_NaN();
        r.S.push_back(MatrixXcd::Constant(m, m, cplx(nan, nan)));
        r.singular.push_back(true);
    }
}

// Unit phase factor picked up when walking from `from` to `to` through M.
cplx traversal_factor(const ModeNetwork &network, std::size_t from, std::size_t to, std::size_t *edge_out) {
    const auto idx = network.edge_between(from, to);
    if (!idx)
        throw Error(Errc::InvalidArgument, "cycle step has no edge",
                    network.modes()[from].id + " -> " + network.modes()[to].id);
    const auto &e = network.edges()[*idx];
    const bool forward = network.mode_index(e.from) == from;
    const bool conversion = e.kind == CouplingKind::Conversion;
    if (edge_out) *edge_out = *idx;
    if (conversion) return std::polar(1.0, forward ? e.phase : -e.phase);
    return forward ? std::polar(1.0, -e.phase) : -std::polar(1.0, e.phase);
}

std::vector<std::size_t> cycle_indices(const ModeNetwork &network, std::span<const std::string> cycle) {
    if (cycle.size() < 2) throw Error(Errc::InvalidArgument, "a cycle needs at least two modes");
    std::vector<std::size_t> idx;
    for (const auto &id : cycle) idx.push_back(network.mode_index(id));
    return idx;
}

}  // namespace

ScatteringResult sweep_detuning(const ModeNetwork &network, std::string_view probe_mode, double delta_min,
                                double delta_max, std::size_t n_points) {
    auto result = empty_result(network, SweepAxis::Detuning);
    const auto probe = probe_mode.empty() ? std::size_t{0} : network.mode_index(probe_mode);
    const bool stable = determinant_roots(network, network.modes()[probe].id).stable;
    for (double d : linspace(delta_min, delta_max, n_points))
        push_point(result, network, assign_frame(network, probe, d), d, stable);
    return result;
}

double loop_phase(const ModeNetwork &network, std::span<const std::string> cycle) {
    const auto idx = cycle_indices(network, cycle);
    cplx product = 1.0;
    for (std::size_t i = 0; i < idx.size(); ++i)
        product *= traversal_factor(network, idx[i], idx[(i + 1) % idx.size()], nullptr);
    return std::arg(product);
}

int loop_phase_sensitivity(const ModeNetwork &network, std::span<const std::string> cycle,
                           std::string_view edge_id) {
    const auto idx = cycle_indices(network, cycle);
    const auto target = network.edge_index(edge_id);
    for (std::size_t i = 0; i < idx.size(); ++i) {
        std::size_t e = 0;
        traversal_factor(network, idx[i], idx[(i + 1) % idx.size()], &e);
        if (e != target) continue;
        const auto &edge = network.edges()[e];
        const bool forward = network.mode_index(edge.from) == idx[i];
        const bool conversion = edge.kind == CouplingKind::Conversion;
        return (forward ? 1 : -1) * (conversion ? 1 : -1);
    }
    throw Error(Errc::InvalidArgument, "edge is not on the cycle", std::string(edge_id));
}

ModeNetwork with_edge_phase(const ModeNetwork &network, std::string_view edge_id, double phase) {
    auto edges = network.edges();
    edges[network.edge_index(edge_id)].phase = phase;
    return with_edges(network, std::move(edges));
}

ScatteringResult sweep_loop_phase(const ModeNetwork &network, std::string_view edge_id, double phase_min,
                                  double phase_max, std::size_t n_points, std::span<const std::string> cycle,
                                  std::string_view probe_mode, double delta) {
    const auto edge = network.edge_index(edge_id);
    auto result = empty_result(network, cycle.empty() ? SweepAxis::EdgePhase : SweepAxis::LoopPhase);
    const auto probe = probe_mode.empty() ? std::size_t{0} : network.mode_index(probe_mode);

    double base = network.edges()[edge].phase;
    int sensitivity = 1;
    double loop0 = base;
    if (!cycle.empty()) {
        sensitivity = loop_phase_sensitivity(network, cycle, edge_id);
        loop0 = loop_phase(network, cycle);
    }
    for (double x : linspace(phase_min, phase_max, n_points)) {
        const double phase = base + sensitivity * (x - loop0);
        const auto net = with_edge_phase(network, edge_id, phase);
        const bool stable = determinant_roots(net, net.modes()[probe].id).stable;
        push_point(result, net, assign_frame(net, probe, delta), x, stable);
    }
    return result;
}

}  // namespace paranet
