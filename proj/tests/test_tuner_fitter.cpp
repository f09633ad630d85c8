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

#include <algorithm>
#include <random>
#include <sstream>

#include <gtest/gtest.h>

#include "paranet/closed_form.hpp"
#include "paranet/fitting.hpp"
#include "paranet/optimize.hpp"
#include "paranet/scattering.hpp"
#include "paranet/tuning.hpp"
#include "support.hpp"

namespace paranet {
namespace {

using testing::edge_beta;
using testing::mode_hz;

MatrixXcd ideal_s(const ModeNetwork &net) {
    return external_block(net, scattering_matrix(net, assign_frame(net, "a", 0.0)));
}

TEST(Tune, ConverterIsMatched) {
    const auto edges = tune(testing::reference_modes(), {Behavior::Converter});
    ASSERT_EQ(edges.size(), 1u);
    const auto net = build_network(testing::reference_modes(), edges);
    EXPECT_NEAR(std::abs(net.beta(0)), 0.5, 1e-15);
    const auto S = ideal_s(net);
    EXPECT_LT(std::abs(S(0, 0)), 1e-12);
    EXPECT_NEAR(std::abs(S(1, 0)), 1.0, 1e-12);
}

TEST(Tune, CirculatorPhases) {
    const auto m = testing::reference_modes();
    const auto fwd = tune(m, {Behavior::Circulator});
    EXPECT_DOUBLE_EQ(fwd[0].phase, kPi / 2);
    EXPECT_DOUBLE_EQ(fwd[1].phase, kPi / 2);
    EXPECT_DOUBLE_EQ(fwd[2].phase, -kPi / 2);
    const auto net = build_network(m, fwd);
    const std::vector<std::string> abc{"a", "b", "c"};
    EXPECT_NEAR(loop_phase(net, abc), -kPi / 2, 1e-15);
    const auto rev = tuned_network(m, {Behavior::Circulator, Direction::Reverse});
    EXPECT_NEAR(loop_phase(rev, abc), kPi / 2, 1e-15);
    EXPECT_LT((ideal_s(rev).cwiseAbs() - ideal_s(net).cwiseAbs().transpose()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Tune, DirectionalAmplifierStrengths) {
    EXPECT_DOUBLE_EQ(directional_amplifier_beta(0.0), 0.0);
    EXPECT_THROW(directional_amplifier_beta(-1.0), Error);
    const double x = directional_amplifier_beta(18.0);
    const double root_g = (1.0 + 4.0 * x * x) / (1.0 - 4.0 * x * x);
    EXPECT_NEAR(20.0 * std::log10(root_g), 18.0, 1e-12);

    const auto net = tuned_network(testing::reference_modes(), {Behavior::DirectionalAmplifier, Direction::Forward, 18.0});
    const auto S = ideal_s(net);
    EXPECT_NEAR(10.0 * std::log10(std::norm(S(2, 0))), 18.0, 0.01);
    EXPECT_LT(std::abs(S(0, 1)), 1e-12);
    const auto rev =
        tuned_network(testing::reference_modes(), {Behavior::DirectionalAmplifier, Direction::Reverse, 18.0});
    EXPECT_NEAR(10.0 * std::log10(std::norm(ideal_s(rev)(0, 2))), 18.0, 0.01);
}

TEST(Tune, ReproducesIdealMatricesThroughClosedForms) {
    const auto m = testing::reference_modes();
    const cplx h(0, 0.5);
    const auto conv = tuned_network(m, {Behavior::Converter});
    Matrix2c<double> s2 = closed_form_conversion<double>(h, h, conv.beta(0), 1.0, 1.0);
    EXPECT_LT(std::abs(s2(0, 0)), 1e-12);
    EXPECT_LT(std::abs(std::abs(s2(1, 0)) - 1.0), 1e-12);

    const auto circ = tuned_network(m, {Behavior::Circulator});
    ThreeModeParams<double> p{{h, h, h}, circ.beta(0), circ.beta(1), circ.beta(2)};
    Matrix3c<double> expected;
    expected << 0, 0, 1, 1, 0, 0, 0, 1, 0;
    EXPECT_LT((closed_form_circulator(p) - expected).cwiseAbs().maxCoeff(), 1e-12);

    const double g = std::pow(10.0, 2.0);
    const auto da = tuned_network(m, {Behavior::DirectionalAmplifier, Direction::Forward, 20.0});
    ThreeModeParams<double> q{{h, h, h}, da.beta(0), da.beta(1), da.beta(2)};
    Eigen::Matrix3d mag;
    mag << 0, 0, 1, std::sqrt(g - 1), std::sqrt(g), 0, std::sqrt(g), std::sqrt(g - 1), 0;
    EXPECT_LT((closed_form_directional_amplifier(q).cwiseAbs() - mag).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Tune, EdgesCarryIdealPumpsAndUnnormalizedStrengths) {
    const auto m = testing::reference_modes();
    const auto edges = tune(m, {Behavior::DirectionalAmplifier, Direction::Forward, 18.0});
    EXPECT_EQ(edges[0].kind, CouplingKind::Amplification);
    EXPECT_DOUBLE_EQ(edges[0].pump_freq, m[0].omega + m[1].omega);
    EXPECT_DOUBLE_EQ(edges[2].pump_freq, m[2].omega - m[0].omega);
    EXPECT_NEAR(edges[2].magnitude, std::sqrt(m[0].kappa() * m[2].kappa()), 1e-6);
    TuneTarget named{Behavior::Converter};
    named.modes = {"b", "c"};
    EXPECT_EQ(tune(m, named).front().id, "bc");
    named.modes = {"b", "z"};
    EXPECT_THROW(tune(m, named), Error);
}

TEST(Tune, IsolationCondition) {
    const cplx product = isolation_condition(std::polar(0.5, kPi / 2), cplx(0, 0.5), Behavior::Circulator);
    EXPECT_NEAR(std::abs(product - (-0.25)), 0.0, 1e-15);
    EXPECT_EQ(isolation_condition(0.0, cplx(0.3, 0.5), Behavior::Circulator), cplx(0.0));
    const cplx b(0.2, 0.1), d(0.3, 0.5);
    EXPECT_EQ(isolation_condition(b, d, Behavior::DirectionalAmplifier), -isolation_condition(b, d, Behavior::Circulator));
    EXPECT_THROW(isolation_condition(b, d, Behavior::Converter), Error);
}

TEST(Optimizer, FitsAnExponential) {
    VectorXd t = VectorXd::LinSpaced(40, 0.0, 4.0);
    VectorXd y = (2.5 * (-1.3 * t.array()).exp()).matrix();
    ResidualFunction f = [&](const VectorXd &x, VectorXd &r) {
        r = (x(0) * (-x(1) * t.array()).exp()).matrix() - y;
        return true;
    };
    VectorXd x0(2), lo(2), hi(2);
    x0 << 1.0, 0.5;
    lo << 0.0, 0.0;
    hi << 10.0, 10.0;
    const auto res = levenberg_marquardt(f, x0, lo, hi);
    EXPECT_TRUE(res.converged);
    EXPECT_NEAR(res.x(0), 2.5, 1e-9);
    EXPECT_NEAR(res.x(1), 1.3, 1e-9);
    EXPECT_LT(res.residual.norm(), 1e-10);
}

TEST(Optimizer, RespectsBoundsAndReportsFailures) {
    VectorXd y = VectorXd::Constant(5, 3.0);
    ResidualFunction f = [&](const VectorXd &x, VectorXd &r) {
        r = VectorXd::Constant(5, x(0)) - y;
        return true;
    };
    VectorXd x0 = VectorXd::Constant(1, 0.5), lo = VectorXd::Constant(1, 0.0), hi = VectorXd::Constant(1, 1.0);
    EXPECT_NEAR(levenberg_marquardt(f, x0, lo, hi).x(0), 1.0, 1e-12);

    ResidualFunction flat = [&](const VectorXd &x, VectorXd &r) {
        r = VectorXd::Constant(5, x(0)) - y;
        r(0) += 0.0 * x(1);
        return true;
    };
    VectorXd x2 = VectorXd::Zero(2), lo2 = VectorXd::Constant(2, -5.0), hi2 = VectorXd::Constant(2, 5.0);
    try {
        levenberg_marquardt(flat, x2, lo2, hi2, {}, {"p", "q"});
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), Errc::DegenerateProblem);
        EXPECT_EQ(e.subject(), "q");
    }
    ResidualFunction rosen = [](const VectorXd &x, VectorXd &r) {
        r.resize(2);
        r << 10.0 * (x(1) - x(0) * x(0)), 1.0 - x(0);
        return true;
    };
    LmOptions tight;
    tight.max_iterations = 1;
    VectorXd xr(2);
    xr << -1.2, 1.0;
    try {
        levenberg_marquardt(rosen, xr, lo2, hi2, tight);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), Errc::NonConvergence);
    }
    EXPECT_NEAR(levenberg_marquardt(rosen, xr, lo2, hi2).x(0), 1.0, 1e-8);
}

// Synthetic converter measurement with multiplicative noise on |S|.
struct Synthetic {
    ModeNetwork truth;
    std::vector<MeasuredTrace> traces;
};

Synthetic converter_data(double beta, double eta_a, double noise, std::uint64_t seed) {
    const std::vector<Mode> m{mode_hz("a", 4.155, 25.0, eta_a), mode_hz("b", 5.756, 36.0, 0.97)};
    const auto truth = build_network(m, {edge_beta(m, 0, 1, CouplingKind::Conversion, beta, 0.3)});
    const double span = 3.0 * truth.max_kappa();
    const auto sweep = sweep_detuning(truth, "a", -span, span, 201);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::vector<MeasuredTrace> traces;
    for (auto [o, i] : {std::pair{"a", "a"}, std::pair{"b", "a"}, std::pair{"b", "b"}}) {
        MeasuredTrace t{o, i, sweep.axis};
        for (std::size_t p = 0; p < sweep.size(); ++p) {
            const cplx s = sweep.at(p, o, i);
            t.values.push_back(s * (1.0 + noise * gauss(rng)));
            t.magnitude.push_back(std::abs(s) * (1.0 + noise * gauss(rng)));
        }
        traces.push_back(std::move(t));
    }
    return {truth, traces};
}

FitProblem converter_problem(const Synthetic &data) {
    auto modes = data.truth.modes();
    const double kappa = modes[0].kappa();
    modes[0].kappa_ext = 0.9 * kappa;
    modes[0].kappa_int = 0.1 * kappa;
    auto start = with_modes(data.truth, modes);
    FitProblem p{start};
    p.probe_mode = "a";
    p.traces = data.traces;
    p.parameters = {{"beta.ab", 0.3, 0.0, 1.0}, {"eta.a", 0.9, 0.5, 1.0}};
    return p;
}

TEST(Fit, NoiselessDataIsRecoveredExactly) {
    const auto data = converter_data(0.37, 0.95, 0.0, 1);
    const auto fit = fit_sweep(converter_problem(data));
    EXPECT_TRUE(fit.converged);
    EXPECT_LT(fit.residual_norm, 1e-10);
    EXPECT_NEAR(fit.value("beta.ab"), 0.37, 1e-9);
    EXPECT_NEAR(fit.value("eta.a"), 0.95, 1e-9);
}

TEST(Fit, NoisyConverterWithinTwoPercent) {
    const auto data = converter_data(0.37, 0.95, 0.005, 2);
    const auto fit = fit_sweep(converter_problem(data));
    EXPECT_NEAR(fit.value("beta.ab"), 0.37, 0.02 * 0.37);
    EXPECT_NEAR(fit.value("eta.a"), 0.95, 0.02 * 0.95);
}

TEST(Fit, StatisticalRoundTripAtThreeNoiseLevels) {
    for (double noise : {0.001, 0.005, 0.02}) {
        const auto data = converter_data(0.37, 0.95, noise, 3);
        auto problem = converter_problem(data);
        problem.parameters.push_back({"kappa.a", hz_to_rad(20e6), hz_to_rad(10e6), hz_to_rad(40e6)});
        const auto fit = fit_sweep(problem);
        const double truth[] = {0.37, 0.95, data.truth.modes()[0].kappa()};
        for (std::size_t i = 0; i < 3; ++i) {
            const double err = fit.std_error(static_cast<Eigen::Index>(i));
            EXPECT_TRUE(std::isfinite(err));
            EXPECT_LT(std::abs(fit.values(static_cast<Eigen::Index>(i)) - truth[i]), 5.0 * err + 1e-12)
                << fit.names[i] << " at noise " << noise;
        }
    }
}

TEST(Fit, ComplexDataAndPhases) {
    const auto data = converter_data(0.42, 0.95, 0.0, 4);
    auto problem = converter_problem(data);
    problem.use_phase = true;
    problem.parameters.push_back({"phase.ab", 0.0, -kPi, kPi});
    const auto fit = fit_sweep(problem);
    EXPECT_NEAR(fit.value("beta.ab"), 0.42, 1e-8);
    EXPECT_NEAR(fit.value("phase.ab"), 0.3, 1e-8);
}

TEST(Fit, InvariantUnderPointReordering) {
    const auto data = converter_data(0.37, 0.95, 0.005, 5);
    auto shuffled = data;
    std::mt19937_64 rng(6);
    for (auto &t : shuffled.traces) {
        std::vector<std::size_t> idx(t.axis.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::shuffle(idx.begin(), idx.end(), rng);
        MeasuredTrace s{t.out_port, t.in_port};
        for (auto k : idx) {
            s.axis.push_back(t.axis[k]);
            s.magnitude.push_back(t.magnitude[k]);
            s.values.push_back(t.values[k]);
        }
        t = s;
    }
    const auto a = fit_sweep(converter_problem(data));
    const auto b = fit_sweep(converter_problem(shuffled));
    EXPECT_NEAR(a.value("beta.ab"), b.value("beta.ab"), 1e-9);
    EXPECT_NEAR(a.value("eta.a"), b.value("eta.a"), 1e-9);
}

TEST(Fit, MatchedConverterReturnLoss) {
    // |S_aa(0)| = 1 - eta for a matched lossy converter; 30 dB return loss.
    const double eta = 1.0 - std::pow(10.0, -30.0 / 20.0);
    const std::vector<Mode> m{mode_hz("a", 4.155, 25.0, eta), mode_hz("b", 5.756, 36.0, eta)};
    const auto truth = build_network(m, {edge_beta(m, 0, 1, CouplingKind::Conversion, 0.5)});
    const auto sweep = sweep_detuning(truth, "a", -2.0 * truth.max_kappa(), 2.0 * truth.max_kappa(), 161);
    MeasuredTrace refl{"a", "a", sweep.axis}, trans{"b", "a", sweep.axis};
    for (std::size_t p = 0; p < sweep.size(); ++p) {
        refl.magnitude.push_back(std::abs(sweep.at(p, "a", "a")));
        trans.magnitude.push_back(std::abs(sweep.at(p, "b", "a")));
    }
    FitProblem problem{testing::two_mode(CouplingKind::Conversion, 0.4, 0.99, eta)};
    problem.traces = {refl, trans};
    problem.parameters = {{"beta.ab", 0.4, 0.0, 1.0}, {"eta.a", 0.99, 0.5, 1.0}};
    const auto fit = fit_sweep(problem);
    EXPECT_NEAR(fit.value("beta.ab"), 0.5, 1e-6);
    const auto S = scattering_matrix(*fit.network, assign_frame(*fit.network, "a", 0.0));
    EXPECT_NEAR(-20.0 * std::log10(std::abs(S(0, 0))), 30.0, 0.01);
}

TEST(Fit, ValidationAndDegeneracy) {
    const auto data = converter_data(0.37, 0.95, 0.0, 7);
    auto problem = converter_problem(data);
    problem.parameters.push_back({"phase.ab", 0.3, -kPi, kPi});
    try {
        fit_sweep(problem);
        FAIL();
    } catch (const Error &e) {
        EXPECT_EQ(e.code(), Errc::DegenerateProblem);
    }
    auto few = converter_problem(data);
    for (auto &t : few.traces) {
        t.axis.resize(0);
        t.magnitude.resize(0);
        t.values.resize(0);
    }
    few.traces.front().axis = {0.0};
    few.traces.front().magnitude = {0.5};
    EXPECT_THROW(fit_sweep(few), Error);
    auto unknown = converter_problem(data);
    unknown.parameters.push_back({"gamma.a", 0.0, 0.0, 1.0});
    EXPECT_THROW(fit_sweep(unknown), Error);
}

TEST(Fit, TracesFromTable) {
    std::istringstream in("axis_Hz,S_ba_dB,S_ba_deg,S_aa_mag\n-1e6,-3,90,0.5\n0,0,45,0.1\n");
    const auto traces = traces_from_table(read_table(in), {"a", "b"});
    ASSERT_EQ(traces.size(), 2u);
    EXPECT_EQ(traces[0].out_port, "b");
    EXPECT_EQ(traces[0].in_port, "a");
    EXPECT_NEAR(traces[0].magnitude[0], std::pow(10.0, -3.0 / 20.0), 1e-15);
    EXPECT_NEAR(std::arg(traces[0].values[1]), kPi / 4, 1e-15);
    EXPECT_DOUBLE_EQ(traces[1].magnitude[1], 0.1);
    EXPECT_DOUBLE_EQ(traces[1].axis[0], hz_to_rad(-1e6));
    std::istringstream bad("axis_Hz,S_zz_dB\n0,1\n");
    EXPECT_THROW(traces_from_table(read_table(bad), {"a", "b"}), Error);
}

}  // namespace
}  // namespace paranet
