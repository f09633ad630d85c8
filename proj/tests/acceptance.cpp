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

// Acceptance checks. Each criterion prints one line:
//   [PASS] <n> <name>: <detail>
// and the process exits non-zero when any selected criterion fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "paranet/closed_form.hpp"
#include "paranet/device.hpp"
#include "paranet/fitting.hpp"
#include "paranet/noise.hpp"
#include "paranet/scattering.hpp"
#include "paranet/stability.hpp"
#include "paranet/tuning.hpp"
#include "support.hpp"

namespace paranet::acceptance {
namespace {

using testing::edge_beta;
using testing::mode_hz;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double max_abs(const MatrixXcd &a, const MatrixXcd &b) { return (a - b).cwiseAbs().maxCoeff(); }

MatrixXcd external_s(const ModeNetwork &net, double delta = 0.0, std::string_view probe = "a") {
    return external_block(net, scattering_matrix(net, assign_frame(net, probe, delta)));
}

ThreeModeParams<double> three_mode_params(const ModeNetwork &net, const FrameAssignment &f) {
    ThreeModeParams<double> p;
    for (std::size_t j = 0; j < 3; ++j) {
        p.delta[j] = f.modes[j].detuning;
        p.eta[j] = net.modes()[j].eta_ext();
    }
    p.beta_ab = net.beta(net.edge_index("ab"));
    p.beta_bc = net.beta(net.edge_index("bc"));
    p.beta_ac = net.beta(net.edge_index("ac"));
    return p;
}

// 1. Tuned converter, circulator and directional amplifier against their
// ideal matrices.
Outcome ideal_matrices() {
    constexpr double kTol = 1e-12;
    constexpr double kMaxSeconds = 1.0;
    const auto t0 = std::chrono::steady_clock::now();
    const auto modes = testing::reference_modes();

    const auto conv = tuned_network(modes, {Behavior::Converter});
    const MatrixXcd sc = external_s(conv);
    const cplx beta = conv.beta(0);
    const double d = 1.0 + 4.0 * std::norm(beta);
    MatrixXcd ideal_conv(2, 2);
    ideal_conv << (1.0 - 4.0 * std::norm(beta)) / d, cplx(0, 4) * beta / d, cplx(0, 4) * std::conj(beta) / d,
        (1.0 - 4.0 * std::norm(beta)) / d;
    const double e_conv = std::max({max_abs(sc, ideal_conv), std::abs(sc(0, 0)), std::abs(std::abs(sc(1, 0)) - 1.0)});

    const auto circ = tuned_network(modes, {Behavior::Circulator});
    MatrixXcd perm(3, 3);
    perm << 0, 0, 1, 1, 0, 0, 0, 1, 0;
    const double e_circ = max_abs(external_s(circ), perm);

    const double gain_db = 18.0;
    const auto da = tuned_network(modes, {Behavior::DirectionalAmplifier, Direction::Forward, gain_db});
    const double x = std::abs(da.beta(0));
    const double root_g = (1.0 + 4.0 * x * x) / (1.0 - 4.0 * x * x);
    const double g = root_g * root_g;
    Eigen::Matrix3d ideal_da;
    ideal_da << 0, 0, 1, std::sqrt(g - 1), root_g, 0, root_g, std::sqrt(g - 1), 0;
    const MatrixXcd sd = external_s(da);
    const double e_da_mag = (sd.cwiseAbs() - ideal_da).cwiseAbs().maxCoeff();
    const double e_da_oracle =
        max_abs(sd, closed_form_directional_amplifier(three_mode_params(da, assign_frame(da, "a", 0.0))));
    const double e_da = std::max(e_da_mag, e_da_oracle);
    const double g_err = std::abs(10.0 * std::log10(g) - gain_db);

    const double elapsed = seconds_since(t0);
    const bool pass = e_conv < kTol && e_circ < kTol && e_da < kTol && g_err < 1e-9 && elapsed < kMaxSeconds;
    return {pass, fmt("converter %.2e, circulator %.2e, directional amplifier %.2e (|S| vs ideal %.2e, "
                      "G = %.6f dB), tol %.0e; %.3f s",
                      e_conv, e_circ, e_da, e_da_mag, 10.0 * std::log10(g), kTol, elapsed)};
}

// 2. General scattering path against the four closed forms over random
// stable draws with detuned pumps and loss.
Outcome oracle_equivalence() {
    constexpr int kDraws = 1000;
    constexpr double kTol = 1e-10;
    std::mt19937_64 rng(2026);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto sym = [&] { return 2.0 * u(rng) - 1.0; };
    auto draw_modes = [&] {
        return std::vector<Mode>{mode_hz("a", 4.155 + 0.05 * sym(), 25.0 + 10.0 * sym(), 0.5 + 0.5 * u(rng)),
                                 mode_hz("b", 5.756 + 0.05 * sym(), 36.0 + 10.0 * sym(), 0.5 + 0.5 * u(rng)),
                                 mode_hz("c", 7.915 + 0.05 * sym(), 60.0 + 10.0 * sym(), 0.5 + 0.5 * u(rng))};
    };
    auto offset = [&](const std::vector<Mode> &m) { return sym() * m[0].kappa(); };
    double worst[4] = {0, 0, 0, 0};
    int accepted[4] = {0, 0, 0, 0};

    while (accepted[0] < kDraws || accepted[1] < kDraws || accepted[2] < kDraws || accepted[3] < kDraws) {
        const auto m = draw_modes();
        const double delta = 3.0 * sym() * m[0].kappa();

        if (accepted[0] < kDraws) {
            auto e = edge_beta(m, 0, 1, CouplingKind::Conversion, u(rng), kPi * sym());
            e.pump_freq += offset(m);
            const auto net = build_network({m[0], m[1]}, {e});
            const auto f = assign_frame(net, "a", delta);
            const auto ref = closed_form_conversion(f.modes[0].detuning, f.modes[1].detuning, net.beta(0),
                                                    m[0].eta_ext(), m[1].eta_ext());
            worst[0] = std::max(worst[0], max_abs(external_block(net, scattering_matrix(net, f)), ref));
            ++accepted[0];
        }
        if (accepted[1] < kDraws) {
            auto e = edge_beta(m, 0, 1, CouplingKind::Amplification, 0.49 * u(rng), kPi * sym());
            e.pump_freq += offset(m);
            const auto net = build_network({m[0], m[1]}, {e});
            if (determinant_roots(net).stable) {
                const auto f = assign_frame(net, "a", delta);
                const auto ref = closed_form_amplifier(f.modes[0].detuning, f.modes[1].detuning, net.beta(0),
                                                       m[0].eta_ext(), m[1].eta_ext());
                worst[1] = std::max(worst[1], max_abs(external_block(net, scattering_matrix(net, f)), ref));
                ++accepted[1];
            }
        }
        const double o_ab = offset(m), o_bc = offset(m);
        if (accepted[2] < kDraws) {
            std::vector<CouplingEdge> e{edge_beta(m, 0, 1, CouplingKind::Conversion, 0.7 * u(rng), kPi * sym()),
                                        edge_beta(m, 1, 2, CouplingKind::Conversion, 0.7 * u(rng), kPi * sym()),
                                        edge_beta(m, 0, 2, CouplingKind::Conversion, 0.7 * u(rng), kPi * sym())};
            e[0].pump_freq += o_ab;
            e[1].pump_freq += o_bc;
            e[2].pump_freq += o_ab + o_bc;
            const auto net = build_network(m, e);
            const auto f = assign_frame(net, "a", delta);
            worst[2] = std::max(worst[2], max_abs(external_block(net, scattering_matrix(net, f)),
                                                  closed_form_circulator(three_mode_params(net, f))));
            ++accepted[2];
        }
        if (accepted[3] < kDraws) {
            std::vector<CouplingEdge> e{edge_beta(m, 0, 1, CouplingKind::Amplification, 0.49 * u(rng), kPi * sym()),
                                        edge_beta(m, 1, 2, CouplingKind::Amplification, 0.49 * u(rng), kPi * sym()),
                                        edge_beta(m, 0, 2, CouplingKind::Conversion, 0.7 * u(rng), kPi * sym())};
            e[0].pump_freq += o_ab;
            e[1].pump_freq += o_bc;
            e[2].pump_freq += o_bc - o_ab;
            const auto net = build_network(m, e);
            if (determinant_roots(net).stable) {
                const auto f = assign_frame(net, "a", delta);
                worst[3] = std::max(worst[3], max_abs(external_block(net, scattering_matrix(net, f)),
                                                      closed_form_directional_amplifier(three_mode_params(net, f))));
                ++accepted[3];
            }
        }
    }
    const double w = std::max({worst[0], worst[1], worst[2], worst[3]});
    return {w < kTol, fmt("%d draws each; max |error| conversion %.2e, amplifier %.2e, circulator %.2e, "
                          "directional amplifier %.2e (tol %.0e)",
                          kDraws, worst[0], worst[1], worst[2], worst[3], kTol)};
}

// 3. |S_aa|^2 - |S_ba|^2 = 1 for the lossless amplifier, and the resonant
// gain formula.
Outcome amplifier_identity() {
    constexpr double kIdentityTol = 1e-9;
    constexpr double kDbTol = 0.01;
    double worst = 0.0, worst_gain = 0.0;
    for (int i = 0; i <= 49; ++i) {
        const double beta = 0.01 * i;
        const auto net = testing::two_mode(CouplingKind::Amplification, beta);
        const double k = net.modes()[0].kappa();
        for (int j = 0; j <= 100; ++j) {
            const double delta = (-5.0 + 0.1 * j) * k;
            const auto S = external_s(net, delta);
            worst = std::max(worst, std::abs(std::norm(S(0, 0)) - std::norm(S(1, 0)) - 1.0));
        }
        const double root_g = (1.0 + 4.0 * beta * beta) / (1.0 - 4.0 * beta * beta);
        worst_gain = std::max(worst_gain, std::abs(std::abs(external_s(net)(0, 0)) / root_g - 1.0));
    }
    const auto s45 = external_s(testing::two_mode(CouplingKind::Amplification, 0.45));
    const double g45 = 10.0 * std::log10(std::norm(s45(0, 0)));
    const bool pass = worst < kIdentityTol && worst_gain < 1e-12 && std::abs(g45 - 19.58) <= kDbTol;
    return {pass, fmt("max identity error %.2e (tol %.0e); max relative sqrt(G) error %.2e; "
                      "beta = 0.45 -> %.4f dB (19.58 +- %.2f)",
                      worst, kIdentityTol, worst_gain, g45, kDbTol)};
}

// 4. Symplectic and unitary structure over random networks of 1-4 modes.
Outcome symplectic_unitarity() {
    constexpr double kTol = 1e-10;
    constexpr int kDraws = 500;
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    double worst_sym = 0.0, worst_unit = 0.0;
    for (int i = 0; i < kDraws; ++i) {
        const auto net = testing::random_network(rng);
        const double delta = u(rng) * net.max_kappa();
        const auto f = assign_frame(net, std::size_t{0}, delta);
        const MatrixXcd S = external_block(net, scattering_matrix(net, f));
        VectorXcd sigma(S.rows());
        Eigen::Index p = 0;
        for (const auto &port : net.ports())
            if (port.role == PortRole::External) sigma(p++) = net.conjugated(net.mode_index(port.mode)) ? -1.0 : 1.0;
        const MatrixXcd Sigma = sigma.asDiagonal();
        worst_sym = std::max(worst_sym, max_abs(S * Sigma * S.adjoint(), Sigma));

        testing::RandomNetworkOptions conv;
        conv.conversion_only = true;
        const auto cn = testing::random_network(rng, conv);
        const MatrixXcd T = external_s(cn, u(rng) * cn.max_kappa(), cn.modes()[0].id);
        worst_unit = std::max(worst_unit, max_abs(T.adjoint() * T, MatrixXcd::Identity(T.rows(), T.cols())));
    }
    return {worst_sym < kTol && worst_unit < kTol,
            fmt("%d networks each; max |S Sigma S^+ - Sigma| %.2e, max |S^+ S - 1| %.2e (tol %.0e)", kDraws,
                worst_sym, worst_unit, kTol)};
}

// 5. Matched lossy converter: |S_ba|^2 = eta_a eta_b; -0.5 dB point.
Outcome insertion_loss() {
    constexpr double kDbTol = 0.01;
    double worst = 0.0;
    for (double eta : {0.5, 0.7, 0.9, 0.99}) {
        const auto S = external_s(testing::two_mode(CouplingKind::Conversion, 0.5, eta, eta));
        worst = std::max(worst, std::abs(std::norm(S(1, 0)) - eta * eta));
    }
    const double eta = std::pow(10.0, -0.025);
    const auto S = external_s(testing::two_mode(CouplingKind::Conversion, 0.5, eta, eta));
    const double il = 10.0 * std::log10(std::norm(S(1, 0)));
    return {worst < 1e-12 && std::abs(il + 0.5) <= kDbTol,
            fmt("max ||S_ba|^2 - eta_a eta_b| %.2e; eta_a eta_b = 10^-0.05 -> %.4f dB (-0.5 +- %.2f)", worst, il,
                kDbTol)};
}

// 6. Matched converter with sqrt(kappa_a kappa_b)/2pi = 30 MHz: 3-dB
// bandwidth of |S_ba|^2 in probe detuning.
Outcome conversion_bandwidth() {
    constexpr double kTarget = 30e6;
    constexpr double kRelTol = 0.05;
    const auto net = testing::two_mode(CouplingKind::Conversion, 0.5);
    const double geo = rad_to_hz(std::sqrt(net.modes()[0].kappa() * net.modes()[1].kappa()));
    auto transmission = [&](double delta) { return std::norm(external_s(net, delta)(1, 0)); };
    const double peak = transmission(0.0);
    auto edge = [&](double sign) {
        double lo = 0.0, hi = sign * 10.0 * net.max_kappa();
        for (int i = 0; i < 200; ++i) {
            const double mid = 0.5 * (lo + hi);
            (transmission(mid) > 0.5 * peak ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    const double width = rad_to_hz(edge(1.0) - edge(-1.0));
    const bool pass = std::abs(width / kTarget - 1.0) <= kRelTol;
    return {pass, fmt("sqrt(kappa_a kappa_b)/2pi = %.3f MHz; full 3-dB width of |S_ba|^2 = %.3f MHz "
                      "(target %.1f MHz +- %.0f%%, ratio to sqrt(kappa_a kappa_b) = %.4f)",
                      geo / 1e6, width / 1e6, kTarget / 1e6, 100.0 * kRelTol, width / geo)};
}

// 7. Quantum-limited added noise and return noise.
Outcome noise_sql() {
    constexpr double kRelTol = 0.01;
    constexpr double kReturnTol = 1e-9;
    const double g_db = 30.0;

    // Two-mode amplifier with sqrt(G) = (1 + 4 beta^2)/(1 - 4 beta^2) at 30 dB.
    const double root_g = std::pow(10.0, g_db / 20.0);
    const double beta = 0.5 * std::sqrt((root_g - 1.0) / (root_g + 1.0));
    const auto amp = testing::two_mode(CouplingKind::Amplification, beta);
    const auto s_amp = external_s(amp);
    const double g_amp = std::norm(s_amp(0, 0));
    const double n_amp = added_noise_input_referred(symmetrized_density(amp, "a", 0.0)(0), g_amp);

    const auto modes = testing::reference_modes();
    const auto da = tuned_network(modes, {Behavior::DirectionalAmplifier, Direction::Forward, g_db});
    const auto s_da = external_s(da);
    const VectorXd n_da = symmetrized_density(da, "a", 0.0);
    const double g_c = std::norm(s_da(2, 0)), g_b = std::norm(s_da(1, 0));
    const double n_c = added_noise_input_referred(n_da(da.port_index("c")), g_c);
    const double n_b = added_noise_input_referred(n_da(da.port_index("b")), g_b);
    const double ret = return_noise_ratio(da, build_network(modes, {}), "a");

    const double worst = std::max({std::abs(n_amp / 0.5 - 1.0), std::abs(n_c / 0.5 - 1.0), std::abs(n_b / 0.5 - 1.0)});
    const bool pass = g_amp >= 999.999 && g_c >= 999.999 && worst <= kRelTol && std::abs(ret - 1.0) <= kReturnTol;
    return {pass, fmt("two-mode G = %.2f dB n_add = %.5f; directional G_ca = %.2f dB n_add(c) = %.5f, "
                      "G_ba = %.2f dB n_add(b) = %.5f; return-noise ratio at a = %.12f",
                      10.0 * std::log10(g_amp), n_amp, 10.0 * std::log10(g_c), n_c, 10.0 * std::log10(g_b), n_b, ret)};
}

// 8. Oscillation thresholds.
Outcome stability() {
    constexpr double kThresholdTol = 1e-6;
    constexpr double kBoundaryDeg = 80.0;
    constexpr double kBoundaryTolDeg = 10.0;
    constexpr double kNearIdealBeta = 0.49;

    const double beta0 = 0.25;
    const auto amp = testing::two_mode(CouplingKind::Amplification, beta0);
    const auto th = oscillation_threshold(amp);
    const double beta_c = th.scale * beta0;
    const bool below = determinant_roots(scale_edges(amp, {}, (0.5 - 1e-7) / beta0)).stable;
    const bool above = !determinant_roots(scale_edges(amp, {}, (0.5 + 1e-7) / beta0)).stable;

    // Directional amplifier with near-ideal strengths; loop phase = phi_ac
    // with phi_ab = -pi/2, phi_bc = pi/2.
    const auto m = testing::reference_modes();
    auto da = [&](double loop) {
        return build_network(m, {edge_beta(m, 0, 1, CouplingKind::Amplification, kNearIdealBeta, -kPi / 2),
                                 edge_beta(m, 1, 2, CouplingKind::Amplification, kNearIdealBeta, kPi / 2),
                                 edge_beta(m, 0, 2, CouplingKind::Conversion, 0.5, loop)});
    };
    auto stable_at = [&](double deg) { return determinant_roots(da(deg_to_rad(deg))).stable; };
    bool unstable_inside = true;
    for (double deg = -79.0; deg <= 79.0; deg += 1.0) unstable_inside = unstable_inside && !stable_at(deg);
    const bool stable_quarter = stable_at(90.0) && stable_at(-90.0);
    double lo = 0.0, hi = 90.0;
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (stable_at(mid) ? hi : lo) = mid;
    }
    const double boundary = 0.5 * (lo + hi);
    const bool pass = std::abs(beta_c - 0.5) <= kThresholdTol && below && above && unstable_inside &&
                      stable_quarter && std::abs(boundary - kBoundaryDeg) <= kBoundaryTolDeg;
    return {pass, fmt("two-mode threshold beta = %.9f (0.5 +- %.0e); directional amplifier |beta| = %.2f: "
                      "unstable for |phi_loop| < 79 deg: %s, stable at +-90 deg: %s, boundary %.2f deg "
                      "(%.0f +- %.0f)",
                      beta_c, kThresholdTol, kNearIdealBeta, unstable_inside ? "yes" : "no",
                      stable_quarter ? "yes" : "no", boundary, kBoundaryDeg, kBoundaryTolDeg)};
}

struct NoiseSweep {
    std::vector<double> v, n;
};

// Dense sampling across the thermal knee, coarse out to the linear regime.
NoiseSweep shot_noise_sweep(double g, double n_add, double t, double omega, double noise, std::mt19937_64 &rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double hw = constants::kHbar * omega;
    const double e = constants::kElementaryCharge;
    const double knee = (hw + 8.0 * constants::kBoltzmann * t) / e;
    const double wide = 8.0 * std::max(n_add, 1.0) * hw / e;
    NoiseSweep s;
    constexpr int kKnee = 100000;
    constexpr int kWide = 200;
    for (int i = 0; i <= kKnee; ++i) s.v.push_back(-knee + 2.0 * knee * i / kKnee);
    for (int i = 0; i <= kWide; ++i) s.v.push_back(-wide + 2.0 * wide * i / kWide);
    for (double v : s.v) s.n.push_back(g * (shot_noise_psd(v, t, omega) + n_add) * (1.0 + noise * gauss(rng)));
    return s;
}

// 9. Shot-noise limits and calibration round trips.
Outcome shot_noise_calibration() {
    constexpr double kRelTol = 0.03;
    constexpr double kTempTol = 0.05;
    constexpr double kSlopeTol = 1e-3;
    constexpr double kNoise = 0.01;
    const double w0 = hz_to_rad(6e9);
    const double zero = shot_noise_psd(0.0, 0.0, w0);
    const double hw = constants::kHbar * w0;
    const double e = constants::kElementaryCharge;
    const double v1 = 200.0 * hw / e, dv = 1.0 * hw / e;
    const double slope = (shot_noise_psd(v1 + dv, 0.05, w0) - shot_noise_psd(v1 - dv, 0.05, w0)) / (2.0 * dv);
    const double slope_err = std::abs(slope / (e / (2.0 * hw)) - 1.0);

    std::mt19937_64 rng(9);
    std::string detail = fmt("N(0, 0) = %.17g; high-bias slope error %.2e", zero, slope_err);
    bool pass = zero == 0.5 && slope_err <= kSlopeTol;

    struct Case {
        double f_hz, g, n_add, t;
        double t_tol;
    };
    const Case cases[] = {{6.0e9, 3.0e7, 2.5, 0.035, kRelTol},
                          {4.155e9, 1.0e8, 34.1, 0.100, kTempTol},
                          {5.756e9, 1.0e8, 22.5, 0.100, kTempTol},
                          {7.915e9, 1.0e8, 22.8, 0.100, kTempTol}};
    for (const auto &c : cases) {
        const double w = hz_to_rad(c.f_hz);
        const auto s = shot_noise_sweep(c.g, c.n_add, c.t, w, kNoise, rng);
        const auto rec = calibrate_system(s.v, s.n, w, {0.5 * c.g, 0.5 * c.n_add + 1.0, 2.0 * c.t});
        const double eg = std::abs(rec.gain / c.g - 1.0);
        const double en = std::abs(rec.n_add / c.n_add - 1.0);
        const double et = std::abs(rec.temperature / c.t - 1.0);
        pass = pass && eg <= kRelTol && en <= kRelTol && et <= c.t_tol;
        detail += fmt("; %.3f GHz: G %+.2f%%, n_add %.3f (%+.2f%%), T %.1f mK (%+.2f%%)", c.f_hz / 1e9,
                      100.0 * (rec.gain / c.g - 1.0), rec.n_add, 100.0 * (rec.n_add / c.n_add - 1.0),
                      1e3 * rec.temperature, 100.0 * (rec.temperature / c.t - 1.0));
    }
    return {pass, detail};
}

// 10. Pump-collision check.
Outcome collision_check_criterion() {
    const auto modes = testing::reference_modes();
    const double guard_hz = 180e6;
    const double factor = hz_to_rad(guard_hz) / build_network(modes, {}).max_kappa();
    const auto clear = collision_check(modes, factor);
    std::vector<Mode> degenerate = modes;
    degenerate[1].omega = 2.0 * degenerate[0].omega;
    const auto hits = collision_check(degenerate, factor);
    std::string first = hits.empty() ? "none" : hits.front().first + " ~ " + hits.front().second;
    return {clear.empty() && !hits.empty(),
            fmt("guard %.0f MHz: %zu collisions at 4.155/5.756/7.915 GHz; w_b = 2 w_a gives %zu (closest %s)",
                guard_hz / 1e6, clear.size(), hits.size(), first.c_str())};
}

std::vector<MeasuredTrace> noisy_traces(const ModeNetwork &truth, double noise, std::mt19937_64 &rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    const double span = 3.0 * truth.max_kappa();
    const auto sweep = sweep_detuning(truth, "a", -span, span, 241);
    std::vector<MeasuredTrace> traces;
    for (std::size_t o : truth.external_ports())
        for (std::size_t i : truth.external_ports()) {
            MeasuredTrace t{truth.ports()[o].id, truth.ports()[i].id, sweep.axis};
            for (std::size_t p = 0; p < sweep.size(); ++p)
                t.magnitude.push_back(std::abs(sweep.S[p](o, i)) * (1.0 + noise * gauss(rng)));
            traces.push_back(std::move(t));
        }
    return traces;
}

// 11. Fit round trips on converter and circulator sweeps.
Outcome fit_round_trip() {
    constexpr double kRelTol = 0.02;
    constexpr double kNoise = 0.005;
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(11);
    double worst = 0.0;
    std::string worst_name;

    auto check = [&](const ModeNetwork &truth, const ModeNetwork &start, const std::vector<std::string> &names,
                     const std::vector<std::pair<double, double>> &bounds) {
        FitProblem problem{start};
        problem.probe_mode = "a";
        problem.traces = noisy_traces(truth, kNoise, rng);
        for (std::size_t i = 0; i < names.size(); ++i)
            problem.parameters.push_back(
                {names[i], parameter_value(start, names[i]), bounds[i].first, bounds[i].second});
        const auto fit = fit_sweep(problem);
        for (const auto &n : names) {
            const double err = std::abs(fit.value(n) / parameter_value(truth, n) - 1.0);
            if (err > worst) {
                worst = err;
                worst_name = n;
            }
        }
    };

    const std::vector<Mode> m2{mode_hz("a", 4.155, 25.0, 0.95), mode_hz("b", 5.756, 36.0, 0.9)};
    const auto conv = build_network(m2, {edge_beta(m2, 0, 1, CouplingKind::Conversion, 0.45, 0.4)});
    const std::vector<Mode> s2{mode_hz("a", 4.155, 28.0, 0.85), mode_hz("b", 5.756, 32.0, 0.97)};
    const auto conv_start = build_network(s2, {edge_beta(s2, 0, 1, CouplingKind::Conversion, 0.35, 0.4)});
    const double k = hz_to_rad(1e6);
    check(conv, conv_start, {"beta.ab", "eta.a", "eta.b", "kappa.a", "kappa.b"},
          {{0.0, 1.0}, {0.5, 1.0}, {0.5, 1.0}, {10.0 * k, 60.0 * k}, {10.0 * k, 60.0 * k}});

    std::vector<Mode> t3{mode_hz("a", 4.155, 25.0, 0.93), mode_hz("b", 5.756, 36.0, 0.95),
                         mode_hz("c", 7.915, 60.0, 0.9)};
    auto circ_edges = [](const std::vector<Mode> &m, double ab, double bc, double ac, double phi_ac) {
        return std::vector<CouplingEdge>{edge_beta(m, 0, 1, CouplingKind::Conversion, ab, kPi / 2),
                                         edge_beta(m, 1, 2, CouplingKind::Conversion, bc, kPi / 2),
                                         edge_beta(m, 0, 2, CouplingKind::Conversion, ac, phi_ac)};
    };
    const auto circ = build_network(t3, circ_edges(t3, 0.45, 0.5, 0.55, -kPi / 2));
    std::vector<Mode> u3{mode_hz("a", 4.155, 25.0, 0.98), mode_hz("b", 5.756, 36.0, 0.9),
                         mode_hz("c", 7.915, 60.0, 0.95)};
    const auto circ_start = build_network(u3, circ_edges(u3, 0.5, 0.45, 0.5, -1.35));
    check(circ, circ_start, {"beta.ab", "beta.bc", "beta.ac", "eta.a", "eta.b", "eta.c", "phase.ac"},
          {{0.0, 1.0}, {0.0, 1.0}, {0.0, 1.0}, {0.5, 1.0}, {0.5, 1.0}, {0.5, 1.0}, {-kPi, 0.0}});

    const double elapsed = seconds_since(t0);
    return {worst <= kRelTol, fmt("converter (5 parameters) and circulator (7 parameters) at %.1f%% noise: worst "
                                  "relative error %.3f%% (%s), tol %.0f%%; %.2f s",
                                  100.0 * kNoise, 100.0 * worst, worst_name.c_str(), 100.0 * kRelTol, elapsed)};
}

struct Criterion {
    int number;
    const char *name;
    std::function<Outcome()> check;
};

const std::vector<Criterion> &criteria() {
    static const std::vector<Criterion> all{
        {1, "ideal_matrices", ideal_matrices},
        {2, "oracle_equivalence", oracle_equivalence},
        {3, "amplifier_identity", amplifier_identity},
        {4, "symplectic_unitarity", symplectic_unitarity},
        {5, "insertion_loss", insertion_loss},
        {6, "conversion_bandwidth", conversion_bandwidth},
        {7, "noise_sql", noise_sql},
        {8, "stability", stability},
        {9, "shot_noise_calibration", shot_noise_calibration},
        {10, "collision_check", collision_check_criterion},
        {11, "fit_round_trip", fit_round_trip},
    };
    return all;
}

}  // namespace
}  // namespace paranet::acceptance

int main(int argc, char **argv) {
    using namespace paranet::acceptance;
    CLI::App app{"paranet acceptance checks"};
    int only = 0;
    app.add_option("--criterion", only, "run a single criterion (1-11)")->check(CLI::Range(1, 11));
    CLI11_PARSE(app, argc, argv);

    bool all_pass = true;
    for (const auto &c : criteria()) {
        if (only != 0 && c.number != only) continue;
        Outcome o;
        try {
            o = c.check();
        } catch (const std::exception &e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("[%s] %d %s: %s\n", o.pass ? "PASS" : "FAIL", c.number, c.name, o.detail.c_str());
        std::fflush(stdout);
        all_pass = all_pass && o.pass;
    }
    return all_pass ? 0 : 1;
}
