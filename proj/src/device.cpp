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

#include "paranet/device.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>

namespace paranet {

FluxCoupling coupling_from_flux(double flux_amplitude, double slope_j, double slope_k) {
    if (!(flux_amplitude >= 0.0) || !std::isfinite(flux_amplitude))
        throw Error(Errc::InvalidArgument, "flux modulation amplitude must be finite and >= 0");
    if (!std::isfinite(slope_j) || !std::isfinite(slope_k))
        throw Error(Errc::InvalidArgument, "flux slopes must be finite");
    return {flux_amplitude / 4.0 * std::sqrt(std::abs(slope_j * slope_k)), slope_j * slope_k < 0.0};
}

void FluxCurve::validate() const {
    if (flux.size() < 4) throw Error(Errc::InvalidArgument, "flux curve needs at least 4 samples");
    if (static_cast<std::size_t>(omega.rows()) != flux.size() ||
        static_cast<std::size_t>(omega.cols()) != mode_ids.size())
        throw Error(Errc::InvalidArgument, "flux curve table has inconsistent dimensions");
    for (std::size_t i = 0; i < flux.size(); ++i) {
        if (!std::isfinite(flux[i])) throw Error(Errc::InvalidArgument, "non-finite flux sample");
        if (i > 0 && !(flux[i] > flux[i - 1]))
            throw Error(Errc::InvalidArgument, "flux samples must be strictly increasing");
    }
    if (!omega.allFinite()) throw Error(Errc::InvalidArgument, "non-finite frequency sample");
}

namespace {

double sgn(double x) { return (x > 0.0) - (x < 0.0); }

// Steffen node derivatives for one column.
VectorXd steffen_derivatives(const std::vector<double> &x, const VectorXd &y) {
    const std::size_t n = x.size();
    std::vector<double> h(n - 1), s(n - 1);
    for (std::size_t i = 0; i + 1 < n; ++i) {
        h[i] = x[i + 1] - x[i];
        s[i] = (y(i + 1) - y(i)) / h[i];
    }
    VectorXd d(n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double p = (s[i - 1] * h[i] + s[i] * h[i - 1]) / (h[i - 1] + h[i]);
        d(i) = (sgn(s[i - 1]) + sgn(s[i])) * std::min({std::abs(s[i - 1]), std::abs(s[i]), 0.5 * std::abs(p)});
    }
    auto end = [](double h0, double h1, double s0, double s1) {
        const double p = s0 * (1.0 + h0 / (h0 + h1)) - s1 * h0 / (h0 + h1);
        if (p * s0 <= 0.0) return 0.0;
        if (std::abs(p) > 2.0 * std::abs(s0)) return 2.0 * s0;
        return p;
    };
    d(0) = end(h[0], h[1], s[0], s[1]);
    d(n - 1) = end(h[n - 2], h[n - 3], s[n - 2], s[n - 3]);
    return d;
}

std::size_t locate(const FluxCurve &curve, double flux) {
    curve.validate();
    if (!(flux >= curve.flux.front() && flux <= curve.flux.back()))
        throw Error(Errc::OutOfRange, "flux bias outside the sampled range");
    const auto it = std::upper_bound(curve.flux.begin(), curve.flux.end(), flux);
    return std::min<std::size_t>(static_cast<std::size_t>(it - curve.flux.begin()), curve.flux.size() - 1) - 1;
}

// Cubic Hermite value and derivative on interval i.
std::pair<double, double> hermite(const FluxCurve &curve, const VectorXd &y, const VectorXd &d, std::size_t i,
                                  double flux) {
    const double h = curve.flux[i + 1] - curve.flux[i];
    const double t = (flux - curve.flux[i]) / h;
    const double s = (y(i + 1) - y(i)) / h;
    const double c2 = (3.0 * s - 2.0 * d(i) - d(i + 1)) / h;
    const double c3 = (d(i) + d(i + 1) - 2.0 * s) / (h * h);
    const double u = t * h;
    return {y(i) + u * (d(i) + u * (c2 + u * c3)), d(i) + u * (2.0 * c2 + 3.0 * u * c3)};
}

}  // namespace

VectorXd flux_slopes(const FluxCurve &curve, double flux) {
    const auto i = locate(curve, flux);
    VectorXd out(curve.omega.cols());
    for (Eigen::Index j = 0; j < curve.omega.cols(); ++j) {
        const VectorXd y = curve.omega.col(j);
        out(j) = hermite(curve, y, steffen_derivatives(curve.flux, y), i, flux).second;
    }
    return out;
}

VectorXd flux_frequencies(const FluxCurve &curve, double flux) {
    const auto i = locate(curve, flux);
    VectorXd out(curve.omega.cols());
    for (Eigen::Index j = 0; j < curve.omega.cols(); ++j) {
        const VectorXd y = curve.omega.col(j);
        out(j) = hermite(curve, y, steffen_derivatives(curve.flux, y), i, flux).first;
    }
    return out;
}

std::vector<Collision> collision_check(std::span<const Mode> modes, double guard_factor) {
    if (!(guard_factor > 0.0)) throw Error(Errc::InvalidArgument, "guard factor must be positive");
    double kmax = 0.0;
    for (const auto &m : modes) kmax = std::max(kmax, m.kappa());
    const double guard = guard_factor * kmax;

    std::vector<std::pair<std::string, double>> lines;
    for (const auto &m : modes) lines.emplace_back(m.id, m.omega);
    for (std::size_t j = 0; j < modes.size(); ++j)
        for (std::size_t k = j; k < modes.size(); ++k) {
            const auto &a = modes[j];
            const auto &b = modes[k];
            const bool swap = b.id < a.id;
            lines.emplace_back(swap ? b.id + "+" + a.id : a.id + "+" + b.id, a.omega + b.omega);
            if (k == j) continue;
            const bool b_high = b.omega >= a.omega;
            const auto &hi = b_high ? b : a;
            const auto &lo = b_high ? a : b;
            lines.emplace_back(hi.id + "-" + lo.id, hi.omega - lo.omega);
        }

    std::vector<Collision> out;
    for (std::size_t p = 0; p < lines.size(); ++p)
        for (std::size_t q = p + 1; q < lines.size(); ++q) {
            const double sep = std::abs(lines[p].second - lines[q].second);
            if (sep >= guard) continue;
            auto first = lines[p];
            auto second = lines[q];
            if (second.first < first.first) std::swap(first, second);
            out.push_back({first.first, second.first, first.second, second.second, sep});
        }
    std::sort(out.begin(), out.end(), [](const Collision &x, const Collision &y) {
        return std::tie(x.separation, x.first, x.second) < std::tie(y.separation, y.first, y.second);
    });
    return out;
}

namespace {

// x coth x, continuous at 0.
double x_coth_x(double x) {
    const double ax = std::abs(x);
    if (ax < 1e-4) return 1.0 + x * x / 3.0;
    if (ax > 40.0) return ax;
    return x / std::tanh(x);
}

}  // namespace

double shot_noise_psd(double voltage, double temperature, double omega) {
    if (!(omega > 0.0)) throw Error(Errc::InvalidArgument, "frequency must be positive");
    if (!(temperature >= 0.0)) throw Error(Errc::InvalidArgument, "temperature must be non-negative");
    const double hw = constants::kHbar * omega;
    const double ev = constants::kElementaryCharge * voltage;
    if (temperature == 0.0) return (std::abs(ev + hw) + std::abs(ev - hw)) / (4.0 * hw);
    const double kt = constants::kBoltzmann * temperature;
    const double pre = kt / (2.0 * hw);
    return pre * (x_coth_x((ev + hw) / (2.0 * kt)) + x_coth_x((ev - hw) / (2.0 * kt)));
}

CalibrationRecord calibrate_system(std::span<const double> voltage, std::span<const double> n_meas, double omega,
                                   const CalibrationGuess &guess, const LmOptions &options) {
    if (voltage.size() != n_meas.size()) throw Error(Errc::InvalidArgument, "voltage and noise lengths differ");
    if (voltage.size() < 10) throw Error(Errc::InvalidArgument, "calibration needs at least 10 points");
    if (!(omega > 0.0)) throw Error(Errc::InvalidArgument, "frequency must be positive");
    for (double n : n_meas)
        if (!(n > 0.0)) throw Error(Errc::InvalidArgument, "measured noise powers must be positive");
    if (!(guess.gain > 0.0) || !(guess.temperature > 0.0) || !(guess.n_add >= 0.0))
        throw Error(Errc::InvalidArgument, "initial guess outside the physical range");

    // Parameters: (G, n_add, T).
    ResidualFunction residual = [&](const VectorXd &x, VectorXd &r) {
        r.resize(static_cast<Eigen::Index>(voltage.size()));
        for (std::size_t i = 0; i < voltage.size(); ++i) {
            const double model = x(0) * (shot_noise_psd(voltage[i], x(2), omega) + x(1));
            r(static_cast<Eigen::Index>(i)) = model / n_meas[i] - 1.0;
        }
        return true;
    };
    VectorXd x0(3), lo(3), hi(3);
    x0 << guess.gain, guess.n_add, guess.temperature;
    lo << guess.gain * 1e-6, 0.0, 1e-6;
    hi << guess.gain * 1e6, std::max(1e6, 1e3 * guess.n_add), 1e3;
    const LmResult lm = levenberg_marquardt(residual, x0, lo, hi, options, {"gain", "n_add", "temperature"});

    CalibrationRecord rec;
    rec.omega = omega;
    rec.gain = lm.x(0);
    rec.n_add = lm.x(1);
    rec.temperature = lm.x(2);
    rec.gain_error = lm.std_error(0);
    rec.n_add_error = lm.std_error(1);
    rec.temperature_error = lm.std_error(2);
    rec.residual_norm = lm.residual.norm();
    rec.iterations = lm.iterations;
    return rec;
}

}  // namespace paranet
