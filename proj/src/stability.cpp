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

#include "paranet/stability.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Eigenvalues>

namespace paranet {

namespace {

std::size_t probe_index(const ModeNetwork &network, std::string_view probe) {
    return probe.empty() ? 0 : network.mode_index(probe);
}

// M(u) = M0 + u * diag(slope), u = delta / max_kappa.
struct AffineCoupling {
    MatrixXcd M0;
    VectorXd slope;
};

AffineCoupling affine_coupling(const ModeNetwork &network, std::size_t probe) {
    const auto frame = assign_frame(network, probe, 0.0);
    AffineCoupling a{coupling_matrix(network, frame), VectorXd(network.num_modes())};
    for (std::size_t j = 0; j < network.num_modes(); ++j) {
        const double s = network.conjugated(j) ? -1.0 : 1.0;
        a.slope(j) = s * frame.modes[j].slope * network.max_kappa() / network.modes()[j].kappa();
    }
    return a;
}

}  // namespace

VectorXcd determinant_polynomial(const ModeNetwork &network, std::string_view probe_mode) {
    const auto a = affine_coupling(network, probe_index(network, probe_mode));
    const auto n = static_cast<Eigen::Index>(network.num_modes());
    const Eigen::Index samples = n + 1;

    // det M(u) sampled on the unit circle; the inverse DFT of the samples
    // gives the coefficients exactly for a degree-n polynomial.
    VectorXcd values(samples);
    for (Eigen::Index k = 0; k < samples; ++k) {
        const cplx u = std::polar(1.0, kTwoPi * double(k) / double(samples));
        MatrixXcd M = a.M0;
        M.diagonal() += u * a.slope.cast<cplx>();
        values(k) = M.partialPivLu().determinant();
    }
    VectorXcd coeffs(samples);
    for (Eigen::Index m = 0; m < samples; ++m) {
        cplx acc = 0.0;
        for (Eigen::Index k = 0; k < samples; ++k)
            acc += values(k) * std::polar(1.0, -kTwoPi * double(k * m) / double(samples));
        coeffs(m) = acc / double(samples);
    }
    // The leading coefficient is known in closed form.
    coeffs(n) = a.slope.prod();
    return coeffs;
}

StabilityReport determinant_roots(const ModeNetwork &network, std::string_view probe_mode) {
    const VectorXcd c = determinant_polynomial(network, probe_mode);
    const auto n = c.size() - 1;

    // Companion matrix of the monic polynomial.
    MatrixXcd companion = MatrixXcd::Zero(n, n);
    for (Eigen::Index i = 1; i < n; ++i) companion(i, i - 1) = 1.0;
    for (Eigen::Index i = 0; i < n; ++i) companion(i, n - 1) = -c(i) / c(n);
    Eigen::ComplexEigenSolver<MatrixXcd> solver(companion, false);

    StabilityReport report;
    report.margin = std::numeric_limits<double>::infinity();
    const double kmax = network.max_kappa();
    for (Eigen::Index i = 0; i < n; ++i) {
        const cplx delta = solver.eigenvalues()(i) * kmax;
        report.roots.push_back(delta);
        report.margin = std::min(report.margin, -delta.imag() / kmax);
        if (delta.imag() > 1e-9 * kmax) report.stable = false;
    }
    std::sort(report.roots.begin(), report.roots.end(), [](const cplx &x, const cplx &y) {
        return x.real() != y.real() ? x.real() < y.real() : x.imag() < y.imag();
    });
    return report;
}

ModeNetwork scale_edges(const ModeNetwork &network, std::span<const std::string> edge_ids, double scale) {
    auto edges = network.edges();
    for (auto &e : edges) {
        const bool selected =
            edge_ids.empty() || std::find(edge_ids.begin(), edge_ids.end(), e.id) != edge_ids.end();
        if (selected) e.magnitude *= scale;
    }
    return with_edges(network, std::move(edges));
}

ThresholdResult oscillation_threshold(const ModeNetwork &network, std::span<const std::string> edge_ids,
                                      std::string_view probe_mode, double scale_cap) {
    for (const auto &id : edge_ids) network.edge_index(id);
    auto unstable = [&](double s) {
        return !determinant_roots(scale_edges(network, edge_ids, s), probe_mode).stable;
    };
    if (unstable(0.0))
        throw Error(Errc::InvalidArgument, "network is unstable with the selected pumps off");

    constexpr int kScanSteps = 256;
    ThresholdResult result;
    double lo = 0.0;
    double hi = -1.0;
    for (int i = 1; i <= kScanSteps; ++i) {
        const double s = scale_cap * double(i) / kScanSteps;
        if (unstable(s)) {
            hi = s;
            break;
        }
        lo = s;
    }
    if (hi < 0.0)
        throw Error(Errc::NoThresholdFound, "no free-oscillation threshold below the scale cap");

    while (hi - lo > 1e-9 * hi) {
        const double mid = 0.5 * (lo + hi);
        (unstable(mid) ? hi : lo) = mid;
        ++result.iterations;
    }
    result.stable_bound = lo;
    result.unstable_bound = hi;
    result.scale = 0.5 * (lo + hi);
    return result;
}

}  // namespace paranet
