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

#include "paranet/fitting.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "paranet/scattering.hpp"

namespace paranet {

namespace {

struct ParamRef {
    enum Kind { Omega, Kappa, Eta, Beta, Phase } kind;
    std::size_t index;
};

ParamRef parse_name(const ModeNetwork &network, std::string_view name) {
    const auto dot = name.find('.');
    if (dot == std::string_view::npos) throw Error(Errc::InvalidArgument, "bad parameter name", std::string(name));
    const auto head = name.substr(0, dot);
    const auto tail = name.substr(dot + 1);
    if (head == "omega") return {ParamRef::Omega, network.mode_index(tail)};
    if (head == "kappa") return {ParamRef::Kappa, network.mode_index(tail)};
    if (head == "eta") return {ParamRef::Eta, network.mode_index(tail)};
    if (head == "beta") return {ParamRef::Beta, network.edge_index(tail)};
    if (head == "phase") return {ParamRef::Phase, network.edge_index(tail)};
    throw Error(Errc::InvalidArgument, "unknown parameter kind '" + std::string(head) + "'", std::string(name));
}

double edge_norm(const std::vector<Mode> &modes, const ModeNetwork &network, const CouplingEdge &e) {
    const double kj = modes[network.mode_index(e.from)].kappa();
    const double kk = modes[network.mode_index(e.to)].kappa();
    return 2.0 * std::sqrt(kj * kk);
}

}  // namespace

double parameter_value(const ModeNetwork &network, std::string_view name) {
    const auto ref = parse_name(network, name);
    switch (ref.kind) {
    case ParamRef::Omega: return network.modes()[ref.index].omega;
    case ParamRef::Kappa: return network.modes()[ref.index].kappa();
    case ParamRef::Eta: return network.modes()[ref.index].eta_ext();
    case ParamRef::Beta: return std::abs(network.beta(ref.index));
    case ParamRef::Phase: return network.edges()[ref.index].phase;
    }
    return 0.0;
}

ModeNetwork apply_parameters(const ModeNetwork &network, const std::vector<std::string> &names,
                             const VectorXd &values) {
    auto modes = network.modes();
    std::vector<double> eta(modes.size());
    for (std::size_t j = 0; j < modes.size(); ++j) eta[j] = modes[j].eta_ext();
    std::vector<double> beta(network.edges().size());
    for (std::size_t i = 0; i < beta.size(); ++i) beta[i] = std::abs(network.beta(i));
    auto edges = network.edges();

    for (std::size_t p = 0; p < names.size(); ++p) {
        const auto ref = parse_name(network, names[p]);
        const double v = values(static_cast<Eigen::Index>(p));
        switch (ref.kind) {
        case ParamRef::Omega: modes[ref.index].omega = v; break;
        case ParamRef::Kappa:
            modes[ref.index].kappa_ext = v;
            modes[ref.index].kappa_int = 0.0;
            break;
        case ParamRef::Eta: eta[ref.index] = v; break;
        case ParamRef::Beta: beta[ref.index] = v; break;
        case ParamRef::Phase: edges[ref.index].phase = v; break;
        }
    }
    for (std::size_t j = 0; j < modes.size(); ++j) {
        const double kappa = modes[j].kappa();
        modes[j].kappa_ext = eta[j] * kappa;
        modes[j].kappa_int = kappa - modes[j].kappa_ext;
    }
    for (std::size_t i = 0; i < edges.size(); ++i) edges[i].magnitude = beta[i] * edge_norm(modes, network, edges[i]);

    return with_edges(with_modes(network, std::move(modes)), std::move(edges));
}

double FitResult::value(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return values(static_cast<Eigen::Index>(i));
    throw Error(Errc::InvalidArgument, "parameter was not fitted", std::string(name));
}

double FitResult::error(std::string_view name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return std_error(static_cast<Eigen::Index>(i));
    throw Error(Errc::InvalidArgument, "parameter was not fitted", std::string(name));
}

FitResult fit_sweep(const FitProblem &problem) {
    const ModeNetwork &ref = problem.model;
    const auto probe = problem.probe_mode.empty() ? std::size_t{0} : ref.mode_index(problem.probe_mode);
    const double probe_omega = ref.modes()[probe].omega;

    const auto np = static_cast<Eigen::Index>(problem.parameters.size());
    if (np == 0) throw Error(Errc::InvalidArgument, "no free parameters");
    std::vector<std::string> names;
    VectorXd x0(np), lo(np), hi(np);
    for (Eigen::Index i = 0; i < np; ++i) {
        const auto &p = problem.parameters[i];
        parse_name(ref, p.name);
        for (const auto &n : names)
            if (n == p.name) throw Error(Errc::DuplicateId, "parameter listed twice", p.name);
        names.push_back(p.name);
        x0(i) = p.initial;
        lo(i) = p.lower;
        hi(i) = p.upper;
    }

    std::size_t n_points = 0;
    struct TraceIndex {
        std::size_t out, in;
        bool complex;
    };
    std::vector<TraceIndex> index;
    for (const auto &t : problem.traces) {
        const bool complex = problem.use_phase && !t.values.empty();
        const std::size_t n = complex ? t.values.size() : t.magnitude.size();
        if (!complex && t.magnitude.empty() && !t.values.empty())
            throw Error(Errc::InvalidArgument, "magnitude fit needs magnitude data; derive it from the complex values");
        if (n != t.axis.size() || (!t.sigma.empty() && t.sigma.size() != n))
            throw Error(Errc::InvalidArgument, "trace S_" + t.out_port + t.in_port + " has inconsistent lengths");
        for (double s : t.sigma)
            if (!(s > 0.0)) throw Error(Errc::InvalidArgument, "uncertainties must be positive");
        index.push_back({ref.port_index(t.out_port), ref.port_index(t.in_port), complex});
        n_points += complex ? 2 * n : n;
    }
    if (n_points < static_cast<std::size_t>(np))
        throw Error(Errc::InvalidArgument, "fewer data points than free parameters");

    ResidualFunction residual = [&](const VectorXd &x, VectorXd &r) {
        ModeNetwork net = ref;
        try {
            net = apply_parameters(ref, names, x);
        } catch (const Error &) {
            return false;
        }
        const double shift = probe_omega - net.modes()[probe].omega;
        r.resize(static_cast<Eigen::Index>(n_points));
        const PortMatrix pm = port_matrix(net);
        Eigen::Index k = 0;
        for (std::size_t ti = 0; ti < problem.traces.size(); ++ti) {
            const auto &t = problem.traces[ti];
            const auto &ix = index[ti];
            for (std::size_t i = 0; i < t.axis.size(); ++i) {
                const auto frame = assign_frame(net, probe, t.axis[i] + shift);
                const MatrixXcd M = coupling_matrix(net, frame);
                if (!(condition_number(M) < kMaxConditionNumber)) return false;
                const VectorXcd col = M.partialPivLu().solve(pm.H.col(ix.in).cast<cplx>());
                cplx s = cplx(0, 1) * pm.H.col(ix.out).cast<cplx>().dot(col);
                if (ix.out == ix.in) s -= 1.0;
                const double w = t.sigma.empty() ? 1.0 : 1.0 / t.sigma[i];
                if (ix.complex) {
                    r(k++) = w * (s.real() - t.values[i].real());
                    r(k++) = w * (s.imag() - t.values[i].imag());
                } else {
                    r(k++) = w * (std::abs(s) - t.magnitude[i]);
                }
            }
        }
        return true;
    };

    const LmResult lm = levenberg_marquardt(residual, x0, lo, hi, problem.options, names);

    FitResult out;
    out.names = names;
    out.values = lm.x;
    for (Eigen::Index i = 0; i < np; ++i)
        if (names[i].starts_with("phase.")) out.values(i) = wrap_phase(out.values(i));
    out.std_error = lm.std_error;
    out.residual = lm.residual;
    out.residual_norm = lm.residual.norm();
    out.iterations = lm.iterations;
    out.converged = lm.converged;
    out.status = lm.status;
    out.n_points = n_points;
    out.network = apply_parameters(ref, names, lm.x);
    return out;
}

namespace {

struct PairSuffix {
    std::string out, in, suffix;
};

std::optional<PairSuffix> parse_column(const std::string &h, const std::vector<std::string> &ports) {
    if (!h.starts_with("S_")) return std::nullopt;
    const auto us = h.rfind('_');
    if (us <= 1) return std::nullopt;
    const std::string body = h.substr(2, us - 2);
    const std::string suffix = h.substr(us + 1);
    for (const auto &o : ports)
        for (const auto &i : ports)
            if (body == o + i || body == o + "_" + i) return PairSuffix{o, i, suffix};
    throw Error(Errc::ParseError, "column '" + h + "' does not name a port pair");
}

}  // namespace

std::vector<MeasuredTrace> traces_from_table(const Table &table, const std::vector<std::string> &port_ids) {
    const auto &axis_hz = table.column("axis_Hz");
    std::vector<double> axis;
    for (double f : axis_hz) axis.push_back(hz_to_rad(f));

    std::map<std::pair<std::string, std::string>, std::map<std::string, const std::vector<double> *>> pairs;
    std::vector<std::pair<std::string, std::string>> order;
    for (std::size_t c = 0; c < table.headers.size(); ++c) {
        const auto parsed = parse_column(table.headers[c], port_ids);
        if (!parsed) continue;
        const auto key = std::make_pair(parsed->out, parsed->in);
        if (!pairs.count(key)) order.push_back(key);
        pairs[key][parsed->suffix] = &table.columns[c];
    }
    std::vector<MeasuredTrace> traces;
    for (const auto &key : order) {
        const auto &cols = pairs[key];
        MeasuredTrace t;
        t.out_port = key.first;
        t.in_port = key.second;
        t.axis = axis;
        auto has = [&](const char *s) { return cols.count(s) > 0; };
        const std::size_t n = axis.size();
        if (has("re") && has("im")) {
            for (std::size_t i = 0; i < n; ++i) t.values.emplace_back(cols.at("re")->at(i), cols.at("im")->at(i));
        } else if (has("dB") && has("deg")) {
            for (std::size_t i = 0; i < n; ++i)
                t.values.push_back(std::polar(std::pow(10.0, cols.at("dB")->at(i) / 20.0),
                                              deg_to_rad(cols.at("deg")->at(i))));
        }
        if (!t.values.empty()) {
            for (const auto &v : t.values) t.magnitude.push_back(std::abs(v));
        } else if (has("dB")) {
            for (double v : *cols.at("dB")) t.magnitude.push_back(std::pow(10.0, v / 20.0));
        } else if (has("mag")) {
            t.magnitude = *cols.at("mag");
        } else {
            throw Error(Errc::ParseError, "no usable columns for S_" + key.first + key.second);
        }
        traces.push_back(std::move(t));
    }
    if (traces.empty()) throw Error(Errc::ParseError, "table has no S-parameter columns");
    return traces;
}

}  // namespace paranet
