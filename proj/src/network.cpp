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

#include "paranet/network.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>
#include <utility>

namespace paranet {

const char *errc_name(Errc code) {
    switch (code) {
        case Errc::InvalidArgument: return "InvalidArgument";
        case Errc::EmptyNetwork: return "EmptyNetwork";
        case Errc::DuplicateId: return "DuplicateId";
        case Errc::UnknownMode: return "UnknownMode";
        case Errc::DuplicateEdge: return "DuplicateEdge";
        case Errc::SelfLoop: return "SelfLoop";
        case Errc::PortRateMismatch: return "PortRateMismatch";
        case Errc::LoopClosureViolation: return "LoopClosureViolation";
        case Errc::OddAmplificationCycle: return "OddAmplificationCycle";
        case Errc::SingularMatrix: return "SingularMatrix";
        case Errc::NonPSDInput: return "NonPSDInput";
        case Errc::GainTooSmall: return "GainTooSmall";
        case Errc::NoThresholdFound: return "NoThresholdFound";
        case Errc::NonConvergence: return "NonConvergence";
        case Errc::DegenerateProblem: return "DegenerateProblem";
        case Errc::OutOfRange: return "OutOfRange";
        case Errc::ParseError: return "ParseError";
        case Errc::IOError: return "IOError";
    }
    return "Unknown";
}

const char *to_string(CouplingKind kind) {
    return kind == CouplingKind::Conversion ? "conversion" : "amplification";
}

double occupation(const Bath &bath) {
    if (const auto *t = std::get_if<Thermal>(&bath)) return t->n_th;
    return 0.0;
}

Mode Mode::from_hz(std::string id, double f_hz, double kappa_ext_hz, double kappa_int_hz) {
    return Mode{std::move(id), hz_to_rad(f_hz), hz_to_rad(kappa_ext_hz), hz_to_rad(kappa_int_hz)};
}

double ideal_pump(CouplingKind kind, double omega_j, double omega_k) {
    return kind == CouplingKind::Conversion ? std::abs(omega_k - omega_j) : omega_j + omega_k;
}

namespace {

bool finite(double x) { return std::isfinite(x); }

// Signal frequency of `to` implied by the signal frequency of `from` across
// an edge (either orientation for amplification; conversion uses the sign of
// the bare mode frequency difference).
double propagate(const CouplingEdge &e, const Mode &from, const Mode &to, double from_signal) {
    if (e.kind == CouplingKind::Amplification) return e.pump_freq - from_signal;
    const double sign = to.omega >= from.omega ? 1.0 : -1.0;
    return from_signal + sign * e.pump_freq;
}

struct TreeEdge {
    std::size_t parent = 0;
    std::size_t edge = 0;
    bool has_parent = false;
};

std::vector<std::size_t> path_to_root(std::size_t v, const std::vector<TreeEdge> &tree) {
    std::vector<std::size_t> path{v};
    while (tree[v].has_parent) {
        v = tree[v].parent;
        path.push_back(v);
    }
    return path;
}

// "a -> b -> c -> a" for the cycle closed by the non-tree edge (u, v).
std::string describe_cycle(std::size_t u, std::size_t v, const std::vector<TreeEdge> &tree,
                           const std::vector<Mode> &modes) {
    auto pu = path_to_root(u, tree);
    auto pv = path_to_root(v, tree);
    std::set<std::size_t> on_pv(pv.begin(), pv.end());
    std::size_t lca = pu.back();
    for (auto x : pu) {
        if (on_pv.count(x)) {
            lca = x;
            break;
        }
    }
    std::vector<std::size_t> cycle;
    for (auto x : pu) {
        cycle.push_back(x);
        if (x == lca) break;
    }
    std::vector<std::size_t> down;
    for (auto x : pv) {
        if (x == lca) break;
        down.push_back(x);
    }
    cycle.insert(cycle.end(), down.rbegin(), down.rend());
    std::ostringstream out;
    for (auto x : cycle) out << modes[x].id << " -> ";
    out << modes[cycle.front()].id;
    return out.str();
}

}  // namespace

std::optional<std::size_t> ModeNetwork::find_mode(std::string_view id) const {
    for (std::size_t i = 0; i < modes_.size(); ++i)
        if (modes_[i].id == id) return i;
    return std::nullopt;
}

std::optional<std::size_t> ModeNetwork::find_edge(std::string_view id) const {
    for (std::size_t i = 0; i < edges_.size(); ++i)
        if (edges_[i].id == id) return i;
    return std::nullopt;
}

std::optional<std::size_t> ModeNetwork::find_port(std::string_view id) const {
    for (std::size_t i = 0; i < ports_.size(); ++i)
        if (ports_[i].id == id) return i;
    return std::nullopt;
}

std::size_t ModeNetwork::mode_index(std::string_view id) const {
    if (auto i = find_mode(id)) return *i;
    throw Error(Errc::UnknownMode, "unknown mode '" + std::string(id) + "'", std::string(id));
}

std::size_t ModeNetwork::edge_index(std::string_view id) const {
    if (auto i = find_edge(id)) return *i;
    throw Error(Errc::InvalidArgument, "unknown edge '" + std::string(id) + "'", std::string(id));
}

std::size_t ModeNetwork::port_index(std::string_view id) const {
    if (auto i = find_port(id)) return *i;
    throw Error(Errc::InvalidArgument, "unknown port '" + std::string(id) + "'", std::string(id));
}

std::optional<std::size_t> ModeNetwork::edge_between(std::size_t j, std::size_t k) const {
    const auto &a = modes_[j].id;
    const auto &b = modes_[k].id;
    for (std::size_t i = 0; i < edges_.size(); ++i) {
        const auto &e = edges_[i];
        if ((e.from == a && e.to == b) || (e.from == b && e.to == a)) return i;
    }
    return std::nullopt;
}

cplx ModeNetwork::beta(std::size_t edge) const {
    const auto &e = edges_[edge];
    const double kj = modes_[mode_index(e.from)].kappa();
    const double kk = modes_[mode_index(e.to)].kappa();
    const double mag = e.magnitude / (2.0 * std::sqrt(kj * kk));
    const double phase = e.kind == CouplingKind::Conversion ? e.phase : -e.phase;
    return std::polar(mag, phase);
}

std::vector<std::size_t> ModeNetwork::external_ports() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < ports_.size(); ++i)
        if (ports_[i].role == PortRole::External) out.push_back(i);
    return out;
}

ModeNetwork build_network(std::vector<Mode> modes, std::vector<CouplingEdge> edges,
                          std::vector<Port> ports) {
    if (modes.empty()) throw Error(Errc::EmptyNetwork, "network has no modes");

    ModeNetwork net;
    std::set<std::string> ids;
    for (const auto &m : modes) {
        if (m.id.empty()) throw Error(Errc::InvalidArgument, "mode with empty id");
        if (!ids.insert(m.id).second)
            throw Error(Errc::DuplicateId, "duplicate mode id '" + m.id + "'", m.id);
        if (!finite(m.omega) || m.omega <= 0.0)
            throw Error(Errc::InvalidArgument, "mode '" + m.id + "': frequency must be positive", m.id);
        if (!finite(m.kappa_ext) || !finite(m.kappa_int) || m.kappa_ext < 0.0 || m.kappa_int < 0.0)
            throw Error(Errc::InvalidArgument, "mode '" + m.id + "': loss rates must be non-negative",
                        m.id);
        if (m.kappa() <= 0.0)
            throw Error(Errc::InvalidArgument, "mode '" + m.id + "': total linewidth must be positive",
                        m.id);
        net.max_kappa_ = std::max(net.max_kappa_, m.kappa());
    }
    net.modes_ = std::move(modes);

    const std::size_t n = net.modes_.size();
    std::set<std::pair<std::size_t, std::size_t>> pairs;
    std::set<std::string> edge_ids;
    for (auto &e : edges) {
        if (e.id.empty()) e.id = e.from + e.to;
        auto j = net.find_mode(e.from);
        auto k = net.find_mode(e.to);
        if (!j) throw Error(Errc::UnknownMode, "edge '" + e.id + "' names unknown mode '" + e.from + "'", e.id);
        if (!k) throw Error(Errc::UnknownMode, "edge '" + e.id + "' names unknown mode '" + e.to + "'", e.id);
        if (*j == *k) throw Error(Errc::SelfLoop, "edge '" + e.id + "' couples a mode to itself", e.id);
        if (!finite(e.magnitude) || e.magnitude < 0.0)
            throw Error(Errc::InvalidArgument, "edge '" + e.id + "': coupling magnitude must be >= 0", e.id);
        if (!finite(e.phase) || !finite(e.pump_freq) || e.pump_freq < 0.0)
            throw Error(Errc::InvalidArgument, "edge '" + e.id + "': invalid phase or pump frequency", e.id);
        if (!pairs.insert(std::minmax(*j, *k)).second)
            throw Error(Errc::DuplicateEdge,
                        "more than one edge between '" + e.from + "' and '" + e.to + "'", e.id);
        if (!edge_ids.insert(e.id).second)
            throw Error(Errc::DuplicateId, "duplicate edge id '" + e.id + "'", e.id);
    }
    net.edges_ = std::move(edges);

    // Ports: validate explicit ones, then fill in the implicit ones per mode.
    std::set<std::string> port_ids;
    for (const auto &p : ports) {
        if (p.id.empty()) throw Error(Errc::InvalidArgument, "port with empty id");
        if (!port_ids.insert(p.id).second)
            throw Error(Errc::DuplicateId, "duplicate port id '" + p.id + "'", p.id);
        if (!net.find_mode(p.mode))
            throw Error(Errc::UnknownMode, "port '" + p.id + "' names unknown mode '" + p.mode + "'", p.id);
        if (!finite(p.rate) || p.rate < 0.0)
            throw Error(Errc::InvalidArgument, "port '" + p.id + "': rate must be >= 0", p.id);
        if (occupation(p.bath) < 0.0)
            throw Error(Errc::InvalidArgument, "port '" + p.id + "': negative bath occupation", p.id);
    }
    for (const auto &m : net.modes_) {
        std::vector<Port> ext;
        std::vector<Port> in;
        for (const auto &p : ports) {
            if (p.mode != m.id) continue;
            (p.role == PortRole::External ? ext : in).push_back(p);
        }
        auto check_sum = [&](const std::vector<Port> &group, double expected, const char *what) {
            double sum = 0.0;
            for (const auto &p : group) sum += p.rate;
            if (std::abs(sum - expected) > 1e-9 * m.kappa())
                throw Error(Errc::PortRateMismatch,
                            "mode '" + m.id + "': " + what + " port rates do not add up to its " + what +
                                " loss rate",
                            m.id);
        };
        if (ext.empty() && m.kappa_ext > 0.0) {
            if (port_ids.count(m.id))
                throw Error(Errc::DuplicateId, "port id '" + m.id + "' clashes with an implicit port", m.id);
            ext.push_back(Port{m.id, m.id, m.kappa_ext, Vacuum{}, PortRole::External});
        }
        if (in.empty() && m.kappa_int > 0.0) {
            const std::string id = m.id + ".int";
            if (port_ids.count(id))
                throw Error(Errc::DuplicateId, "port id '" + id + "' clashes with an implicit port", id);
            in.push_back(Port{id, m.id, m.kappa_int, Vacuum{}, PortRole::Internal});
        }
        check_sum(ext, m.kappa_ext, "external");
        check_sum(in, m.kappa_int, "internal");
        for (auto &p : ext) net.ports_.push_back(std::move(p));
        for (auto &p : in) net.ports_.push_back(std::move(p));
    }

    // Spanning forest from the first-declared mode of each component fixes
    // the conjugation signature and the signal-frequency map.
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> adj(n);
    for (std::size_t i = 0; i < net.edges_.size(); ++i) {
        const auto j = net.mode_index(net.edges_[i].from);
        const auto k = net.mode_index(net.edges_[i].to);
        adj[j].emplace_back(k, i);
        adj[k].emplace_back(j, i);
    }
    net.signs_.assign(n, 0);
    net.roots_.assign(n, 0);
    net.offsets_.assign(n, 0.0);
    std::vector<double> signal(n, 0.0);  // with each root driven on resonance
    std::vector<TreeEdge> tree(n);
    std::vector<bool> tree_edge(net.edges_.size(), false);
    for (std::size_t root = 0; root < n; ++root) {
        if (net.signs_[root] != 0) continue;
        net.signs_[root] = 1;
        net.roots_[root] = root;
        signal[root] = net.modes_[root].omega;
        std::deque<std::size_t> queue{root};
        while (!queue.empty()) {
            const auto u = queue.front();
            queue.pop_front();
            for (auto [v, ei] : adj[u]) {
                if (net.signs_[v] != 0) continue;
                const auto &e = net.edges_[ei];
                const bool amp = e.kind == CouplingKind::Amplification;
                net.signs_[v] = amp ? -net.signs_[u] : net.signs_[u];
                net.roots_[v] = root;
                signal[v] = propagate(e, net.modes_[u], net.modes_[v], signal[u]);
                // w_v^s = slope_v w_root^s + offset_v with slope_v = sign_v
                net.offsets_[v] = signal[v] - net.signs_[v] * signal[root];
                tree[v] = TreeEdge{u, ei, true};
                tree_edge[ei] = true;
                queue.push_back(v);
            }
        }
    }

    const double tolerance = 1e-6 * net.max_kappa_;
    for (std::size_t i = 0; i < net.edges_.size(); ++i) {
        if (tree_edge[i]) continue;
        const auto &e = net.edges_[i];
        const auto j = net.mode_index(e.from);
        const auto k = net.mode_index(e.to);
        const bool amp = e.kind == CouplingKind::Amplification;
        const int expected = amp ? -net.signs_[j] : net.signs_[j];
        if (net.signs_[k] != expected)
            throw Error(Errc::OddAmplificationCycle,
                        "cycle " + describe_cycle(j, k, tree, net.modes_) +
                            " has an odd number of amplification edges",
                        e.id);
        const double implied = propagate(e, net.modes_[j], net.modes_[k], signal[j]);
        const double residual = std::abs(implied - signal[k]);
        if (residual > tolerance) {
            std::ostringstream msg;
            msg << "pump frequencies around cycle " << describe_cycle(j, k, tree, net.modes_)
                << " do not close (mismatch " << rad_to_hz(residual) << " Hz)";
            throw Error(Errc::LoopClosureViolation, msg.str(), e.id);
        }
        net.loop_residual_ = std::max(net.loop_residual_, residual);
    }
    return net;
}

ModeNetwork with_edges(const ModeNetwork &network, std::vector<CouplingEdge> edges) {
    return build_network(network.modes(), std::move(edges), network.ports());
}

ModeNetwork with_modes(const ModeNetwork &network, std::vector<Mode> modes) {
    if (modes.size() != network.num_modes())
        throw Error(Errc::InvalidArgument, "mode count differs from the network");
    std::vector<Port> ports;
    for (std::size_t j = 0; j < modes.size(); ++j) {
        const Mode &old = network.modes()[j];
        if (modes[j].id != old.id) throw Error(Errc::InvalidArgument, "mode ids must be kept", modes[j].id);
        for (const auto &p : network.ports()) {
            if (p.mode != old.id) continue;
            const bool ext = p.role == PortRole::External;
            const double from = ext ? old.kappa_ext : old.kappa_int;
            const double to = ext ? modes[j].kappa_ext : modes[j].kappa_int;
            if (from <= 0.0 || to <= 0.0) continue;
            Port q = p;
            q.rate = p.rate * (to / from);
            ports.push_back(std::move(q));
        }
    }
    return build_network(std::move(modes), network.edges(), std::move(ports));
}

FrameAssignment assign_frame(const ModeNetwork &network, std::string_view probe_mode, double delta) {
    return assign_frame(network, probe_mode.empty() ? std::size_t{0} : network.mode_index(probe_mode), delta);
}

FrameAssignment assign_frame(const ModeNetwork &network, std::size_t probe, double delta) {
    const auto n = network.num_modes();
    if (probe >= n) throw Error(Errc::UnknownMode, "probe mode index out of range");
    FrameAssignment frame;
    frame.probe_mode = probe;
    frame.delta = delta;
    frame.modes.resize(n);

    // Signal frequency of each component root.
    std::vector<double> root_signal(n, 0.0);
    std::vector<bool> root_set(n, false);
    const auto probe_root = network.component_root(probe);
    const double probe_signal = network.modes()[probe].omega + delta;
    root_signal[probe_root] =
        network.frame_slope(probe) * (probe_signal - network.frame_offset(probe));
    root_set[probe_root] = true;

    // Which way each mode's signal moves with delta.
    const int probe_slope = network.frame_slope(probe);
    for (std::size_t j = 0; j < n; ++j) {
        const auto r = network.component_root(j);
        if (!root_set[r]) {
            root_signal[r] = network.modes()[r].omega + delta;
            root_set[r] = true;
        }
        const auto &m = network.modes()[j];
        auto &mf = frame.modes[j];
        mf.signal_freq = network.frame_slope(j) * root_signal[r] + network.frame_offset(j);
        mf.detuning = cplx((mf.signal_freq - m.omega) / m.kappa(), 0.5);
        mf.conjugated = network.conjugated(j);
        mf.slope = r == probe_root ? network.frame_slope(j) * probe_slope : network.frame_slope(j);
    }
    return frame;
}

MatrixXcd coupling_matrix(const ModeNetwork &network, const FrameAssignment &frame) {
    const auto n = network.num_modes();
    MatrixXcd M = MatrixXcd::Zero(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        const cplx d = frame.modes[j].detuning;
        M(j, j) = network.conjugated(j) ? -std::conj(d) : d;
    }
    for (std::size_t i = 0; i < network.edges().size(); ++i) {
        const auto &e = network.edges()[i];
        const auto j = network.mode_index(e.from);
        const auto k = network.mode_index(e.to);
        const cplx b = network.beta(i);
        M(j, k) = b;
        M(k, j) = e.kind == CouplingKind::Conversion ? std::conj(b) : -std::conj(b);
    }
    return M;
}

}  // namespace paranet
