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

// Domain types for networks of parametrically coupled resonant modes and the
// construction of the normalized mode-coupling matrix M.
//
// Every mode j obeys, in the frame rotating at its signal frequency,
//
//     sum_k sqrt(kappa_j kappa_k) M_jk x_k = i sqrt(kappa_j^ext) x_j,in
//
// where x_j is the mode amplitude, or its conjugate when the mode sits on the
// idler side of an amplification edge. All rates are angular (rad/s).

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "paranet/core.hpp"

namespace paranet {

enum class CouplingKind { Conversion, Amplification };

const char *to_string(CouplingKind kind);

struct Vacuum {};

struct Thermal {
    double n_th = 0.0;
};

using Bath = std::variant<Vacuum, Thermal>;

/// Mean occupation number of a bath.
double occupation(const Bath &bath);

struct Mode {
    std::string id;
    double omega = 0.0;
    double kappa_ext = 0.0;
    double kappa_int = 0.0;

    double kappa() const { return kappa_ext + kappa_int; }
    double eta_ext() const { return kappa_ext / kappa(); }
    double eta_int() const { return 1.0 - eta_ext(); }

    /// Builds a mode from frequencies quoted in Hz (f, kappa/2pi).
    static Mode from_hz(std::string id, double f_hz, double kappa_ext_hz, double kappa_int_hz);
};

/// A pump-mediated link. `magnitude` is |g| in rad/s, `pump_freq` the pump
/// angular frequency. The normalized coupling is
/// beta = |g| e^{+i phase} / (2 sqrt(kappa_j kappa_k)) for conversion and
/// |g| e^{-i phase} / (2 sqrt(kappa_j kappa_k)) for amplification.
struct CouplingEdge {
    std::string from;
    std::string to;
    CouplingKind kind = CouplingKind::Conversion;
    double magnitude = 0.0;
    double phase = 0.0;
    double pump_freq = 0.0;
    std::string id;  // defaults to from + to
};

/// Ideal pump frequency for a link between two modes: |w_k - w_j| for
/// conversion, w_j + w_k for amplification.
double ideal_pump(CouplingKind kind, double omega_j, double omega_k);

enum class PortRole { External, Internal };

struct Port {
    std::string id;
    std::string mode;
    double rate = 0.0;
    Bath bath = Vacuum{};
    PortRole role = PortRole::External;
};

/// Validated, immutable network. Ports are grouped by mode in mode order,
/// external ports first.
class ModeNetwork {
public:
    const std::vector<Mode> &modes() const { return modes_; }
    const std::vector<CouplingEdge> &edges() const { return edges_; }
    const std::vector<Port> &ports() const { return ports_; }

    std::size_t num_modes() const { return modes_.size(); }
    std::size_t num_ports() const { return ports_.size(); }

    std::size_t mode_index(std::string_view id) const;
    std::size_t edge_index(std::string_view id) const;
    std::size_t port_index(std::string_view id) const;
    std::optional<std::size_t> find_mode(std::string_view id) const;
    std::optional<std::size_t> find_edge(std::string_view id) const;
    std::optional<std::size_t> find_port(std::string_view id) const;

    /// Edge joining two modes (either orientation), if any.
    std::optional<std::size_t> edge_between(std::size_t j, std::size_t k) const;

    /// Conjugation signature: +1 for modes entering as amplitudes, -1 for
    /// modes entering as conjugate amplitudes.
    int sign(std::size_t mode) const { return signs_[mode]; }
    bool conjugated(std::size_t mode) const { return signs_[mode] < 0; }

    /// Normalized complex coupling beta of an edge.
    cplx beta(std::size_t edge) const;

    double max_kappa() const { return max_kappa_; }

    /// Largest pump-frequency mismatch over all closed cycles (rad/s).
    double loop_closure_residual() const { return loop_residual_; }

    /// Index of the root mode of the component containing `mode`.
    std::size_t component_root(std::size_t mode) const { return roots_[mode]; }

    /// Signal frequency of `mode` given the signal frequency of its
    /// component root: w_j^s = slope_j * w_root^s + offset_j.
    int frame_slope(std::size_t mode) const { return signs_[mode]; }
    double frame_offset(std::size_t mode) const { return offsets_[mode]; }

    std::vector<std::size_t> external_ports() const;

private:
    friend ModeNetwork build_network(std::vector<Mode>, std::vector<CouplingEdge>, std::vector<Port>);

    std::vector<Mode> modes_;
    std::vector<CouplingEdge> edges_;
    std::vector<Port> ports_;
    std::vector<int> signs_;
    std::vector<std::size_t> roots_;
    std::vector<double> offsets_;
    double max_kappa_ = 0.0;
    double loop_residual_ = 0.0;
};

/// Validates and freezes a network. Internal-loss ports are generated for
/// modes with kappa_int > 0, and one external port (named after the mode)
/// for modes with kappa_ext > 0 that have no explicit external port.
ModeNetwork build_network(std::vector<Mode> modes, std::vector<CouplingEdge> edges,
                          std::vector<Port> ports = {});

/// Rebuilds `network` with a different edge set, keeping modes and ports.
ModeNetwork with_edges(const ModeNetwork &network, std::vector<CouplingEdge> edges);

/// Rebuilds `network` with new mode parameters (same ids, same order).
/// Port rates are rescaled in proportion to the new external and internal
/// loss rates; edges and pumps are kept.
ModeNetwork with_modes(const ModeNetwork &network, std::vector<Mode> modes);

struct ModeFrame {
    double signal_freq = 0.0;  // w_j^s, rad/s
    cplx detuning;             // Delta_j = (w_j^s - w_j)/kappa_j + i/2
    bool conjugated = false;
    int slope = 1;             // d w_j^s / d delta
};

struct FrameAssignment {
    std::size_t probe_mode = 0;
    double delta = 0.0;
    std::vector<ModeFrame> modes;
};

/// Drives the probe mode at w_probe + delta and propagates signal
/// frequencies to every mode through the pumps. Components not connected
/// to the probe are driven at their root mode's frequency + delta.
/// An empty probe id selects the first mode.
FrameAssignment assign_frame(const ModeNetwork &network, std::string_view probe_mode, double delta);
FrameAssignment assign_frame(const ModeNetwork &network, std::size_t probe_mode, double delta);

/// Mode-coupling matrix: diagonal Delta_j (or -conj(Delta_j) for conjugated
/// modes); an edge j->k contributes M_jk = beta and M_kj = conj(beta) for
/// conversion or M_kj = -conj(beta) for amplification.
MatrixXcd coupling_matrix(const ModeNetwork &network, const FrameAssignment &frame);

}  // namespace paranet
