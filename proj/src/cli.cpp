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

#include "paranet/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>
#include <yaml-cpp/yaml.h>

#include "paranet/device.hpp"
#include "paranet/fitting.hpp"
#include "paranet/noise.hpp"
#include "paranet/stability.hpp"
#include "paranet/table.hpp"
#include "paranet/tuning.hpp"

namespace paranet::cli {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr const char *kSchema = "paranet/1";

/// Validation failure tied to a config location.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Source {
    std::string name;
    std::map<std::string, int> lines;  // mode/edge/port id -> line

    std::string at(const YAML::Node &node) const {
        const auto mark = node.Mark();
        if (mark.line < 0) return name;
        return name + ":" + std::to_string(mark.line + 1);
    }
    std::string at(const std::string &subject) const {
        const auto it = lines.find(subject);
        return it == lines.end() ? name : name + ":" + std::to_string(it->second);
    }
};

[[noreturn]] void fail(const Source &src, const YAML::Node &node, const std::string &msg) {
    throw ConfigError(src.at(node) + ": " + msg);
}

void check_keys(const Source &src, const YAML::Node &node, std::initializer_list<const char *> allowed) {
    if (!node.IsMap()) fail(src, node, "expected a mapping");
    for (const auto &kv : node) {
        const auto key = kv.first.as<std::string>();
        bool ok = false;
        for (const char *a : allowed) ok = ok || key == a;
        if (!ok) fail(src, kv.first, "unknown key '" + key + "'");
    }
}

template <typename T>
T as(const Source &src, const YAML::Node &node, const std::string &key) {
    try {
        return node.as<T>();
    } catch (const YAML::Exception &) {
        fail(src, node, "invalid value for '" + key + "'");
    }
}

template <typename T>
T need(const Source &src, const YAML::Node &parent, const std::string &key) {
    const YAML::Node n = parent[key];
    if (!n) fail(src, parent, "missing key '" + key + "'");
    return as<T>(src, n, key);
}

template <typename T>
T opt(const Source &src, const YAML::Node &parent, const std::string &key, T fallback) {
    const YAML::Node n = parent[key];
    if (!n || n.IsNull()) return fallback;
    return as<T>(src, n, key);
}

std::string fmt12(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string pair_label(const std::vector<std::string> &ids, const std::string &out, const std::string &in) {
    bool short_ids = true;
    for (const auto &id : ids) short_ids = short_ids && id.size() == 1;
    return "S_" + out + (short_ids ? "" : "_") + in;
}

CouplingKind parse_kind(const Source &src, const YAML::Node &node) {
    const auto s = as<std::string>(src, node, "kind");
    if (s == "conversion") return CouplingKind::Conversion;
    if (s == "amplification") return CouplingKind::Amplification;
    fail(src, node, "kind must be 'conversion' or 'amplification'");
}

ModeNetwork parse_network_impl(const YAML::Node &net, Source &src) {
    check_keys(src, net, {"modes", "edges", "ports"});
    const YAML::Node modes_node = net["modes"];
    if (!modes_node || !modes_node.IsSequence() || modes_node.size() == 0)
        fail(src, net, "network needs a non-empty 'modes' list");

    std::vector<Mode> modes;
    std::map<std::string, std::pair<double, double>> baths;  // id -> (n_th, n_th_int)
    std::map<std::string, std::pair<bool, bool>> bath_set;
    for (const auto &m : modes_node) {
        check_keys(src, m, {"id", "f_Hz", "kappa_ext_Hz", "kappa_int_Hz", "n_th", "n_th_int"});
        const auto id = need<std::string>(src, m, "id");
        src.lines.emplace(id, m.Mark().line + 1);
        modes.push_back(Mode::from_hz(id, need<double>(src, m, "f_Hz"), opt<double>(src, m, "kappa_ext_Hz", 0.0),
                                      opt<double>(src, m, "kappa_int_Hz", 0.0)));
        baths[id] = {opt<double>(src, m, "n_th", 0.0), opt<double>(src, m, "n_th_int", 0.0)};
        bath_set[id] = {bool(m["n_th"]), bool(m["n_th_int"])};
    }
    auto find_mode = [&](const std::string &id) -> const Mode * {
        for (const auto &m : modes)
            if (m.id == id) return &m;
        return nullptr;
    };

    std::vector<CouplingEdge> edges;
    if (const YAML::Node en = net["edges"]; en && !en.IsNull()) {
        if (!en.IsSequence()) fail(src, en, "'edges' must be a list");
        for (const auto &e : en) {
            check_keys(src, e, {"id", "from", "to", "kind", "g_Hz", "beta", "phase_deg", "pump_f_Hz"});
            CouplingEdge edge;
            edge.from = need<std::string>(src, e, "from");
            edge.to = need<std::string>(src, e, "to");
            edge.kind = e["kind"] ? parse_kind(src, e["kind"]) : (fail(src, e, "missing key 'kind'"), edge.kind);
            edge.id = opt<std::string>(src, e, "id", edge.from + edge.to);
            src.lines.emplace(edge.id, e.Mark().line + 1);
            const Mode *j = find_mode(edge.from);
            const Mode *k = find_mode(edge.to);
            if (!j) fail(src, e, "edge '" + edge.id + "' names unknown mode '" + edge.from + "'");
            if (!k) fail(src, e, "edge '" + edge.id + "' names unknown mode '" + edge.to + "'");
            if (bool(e["g_Hz"]) == bool(e["beta"])) fail(src, e, "give exactly one of 'g_Hz' and 'beta'");
            edge.magnitude = e["g_Hz"] ? hz_to_rad(need<double>(src, e, "g_Hz"))
                                       : 2.0 * need<double>(src, e, "beta") * std::sqrt(j->kappa() * k->kappa());
            edge.phase = deg_to_rad(opt<double>(src, e, "phase_deg", 0.0));
            edge.pump_freq = e["pump_f_Hz"] ? hz_to_rad(need<double>(src, e, "pump_f_Hz"))
                                            : ideal_pump(edge.kind, j->omega, k->omega);
            edges.push_back(std::move(edge));
        }
    }

    std::vector<Port> ports;
    std::map<std::string, std::pair<bool, bool>> has_ports;
    if (const YAML::Node pn = net["ports"]; pn && !pn.IsNull()) {
        if (!pn.IsSequence()) fail(src, pn, "'ports' must be a list");
        for (const auto &p : pn) {
            check_keys(src, p, {"id", "mode", "rate_Hz", "role", "n_th"});
            Port port;
            port.id = need<std::string>(src, p, "id");
            src.lines.emplace(port.id, p.Mark().line + 1);
            port.mode = need<std::string>(src, p, "mode");
            port.rate = hz_to_rad(need<double>(src, p, "rate_Hz"));
            const auto role = opt<std::string>(src, p, "role", "external");
            if (role != "external" && role != "internal") fail(src, p["role"], "role must be external or internal");
            port.role = role == "external" ? PortRole::External : PortRole::Internal;
            const double n = opt<double>(src, p, "n_th", 0.0);
            if (n != 0.0) port.bath = Thermal{n};
            (port.role == PortRole::External ? has_ports[port.mode].first : has_ports[port.mode].second) = true;
            ports.push_back(std::move(port));
        }
    }
    // Mode-level baths become explicit ports.
    for (const auto &m : modes) {
        const auto [ext_set, int_set] = bath_set[m.id];
        const auto [n_ext, n_int] = baths[m.id];
        if (ext_set && !has_ports[m.id].first && m.kappa_ext > 0.0)
            ports.push_back(Port{m.id, m.id, m.kappa_ext, n_ext > 0 ? Bath{Thermal{n_ext}} : Bath{Vacuum{}},
                                 PortRole::External});
        if (int_set && !has_ports[m.id].second && m.kappa_int > 0.0)
            ports.push_back(Port{m.id + ".int", m.id, m.kappa_int,
                                 n_int > 0 ? Bath{Thermal{n_int}} : Bath{Vacuum{}}, PortRole::Internal});
    }

    try {
        return build_network(std::move(modes), std::move(edges), std::move(ports));
    } catch (const Error &e) {
        throw ConfigError(src.at(e.subject()) + ": " + e.what());
    }
}

// ---------------------------------------------------------------- output

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::string str() const {
        std::ostringstream os;
        auto line = [&](const std::vector<std::string> &cells) {
            for (std::size_t i = 0; i < cells.size(); ++i) os << (i ? "," : "") << cells[i];
            os << '\n';
        };
        line(header);
        for (const auto &r : rows) line(r);
        return os.str();
    }
};

struct TaskOutput {
    json doc;
    std::optional<Csv> csv;
    std::optional<std::string> yaml{};  // overrides the generic JSON -> YAML rendering
    std::string default_format = "json";
    bool numerical_failure = false;
    std::string failure_message{};
};

void emit_yaml(YAML::Emitter &em, const json &j) {
    if (j.is_object()) {
        em << YAML::BeginMap;
        for (const auto &[k, v] : j.items()) {
            em << YAML::Key << k << YAML::Value;
            emit_yaml(em, v);
        }
        em << YAML::EndMap;
    } else if (j.is_array()) {
        const bool flow = !j.empty() && !j.front().is_structured();
        em << (flow ? YAML::Flow : YAML::Block) << YAML::BeginSeq;
        for (const auto &v : j) emit_yaml(em, v);
        em << YAML::EndSeq;
    } else if (j.is_boolean()) {
        em << j.get<bool>();
    } else if (j.is_number_integer()) {
        em << j.get<long long>();
    } else if (j.is_number()) {
        em << j.get<double>();
    } else if (j.is_null()) {
        em << YAML::Null;
    } else {
        em << j.get<std::string>();
    }
}

std::string to_yaml(const json &j) {
    YAML::Emitter em;
    em.SetDoublePrecision(17);
    emit_yaml(em, j);
    return std::string(em.c_str()) + "\n";
}

json complex_json(cplx z) {
    auto num = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
    return json::array({num(z.real()), num(z.imag())});
}

json ports_json(const ScatteringResult &r) {
    json ports = json::array();
    for (std::size_t i = 0; i < r.port_ids.size(); ++i)
        ports.push_back({{"id", r.port_ids[i]},
                         {"external", bool(r.port_external[i])},
                         {"conjugated", bool(r.port_conjugated[i])}});
    return ports;
}

std::vector<std::size_t> external_indices(const ScatteringResult &r) {
    std::vector<std::size_t> ext;
    for (std::size_t i = 0; i < r.port_ids.size(); ++i)
        if (r.port_external[i]) ext.push_back(i);
    return ext;
}

json scattering_doc(const ScatteringResult &r, const std::string &task) {
    const bool detuning = r.axis_kind == SweepAxis::Detuning;
    json axis = json::array();
    for (double x : r.axis) axis.push_back(detuning ? rad_to_hz(x) : rad_to_deg(x));
    const auto ext = external_indices(r);
    json points = json::array();
    for (std::size_t p = 0; p < r.size(); ++p) {
        json rows = json::array();
        for (auto o : ext) {
            json row = json::array();
            for (auto i : ext) row.push_back(complex_json(r.S[p](o, i)));
            rows.push_back(std::move(row));
        }
        points.push_back(std::move(rows));
    }
    json ext_ids = json::array();
    for (auto i : ext) ext_ids.push_back(r.port_ids[i]);
    json singular = json::array(), stable = json::array();
    for (std::size_t p = 0; p < r.size(); ++p) {
        singular.push_back(bool(r.singular[p]));
        stable.push_back(bool(r.stable[p]));
    }
    return {{"schema", kSchema},
            {"task", task},
            {"axis", {{"name", detuning ? "delta" : "phase"}, {"unit", detuning ? "Hz" : "deg"}, {"values", axis}}},
            {"ports", ports_json(r)},
            {"S_ports", ext_ids},
            {"S", points},
            {"singular", singular},
            {"stable", stable}};
}

Csv scattering_table(const ScatteringResult &r) {
    Csv csv;
    const bool detuning = r.axis_kind == SweepAxis::Detuning;
    csv.header.push_back(detuning ? "delta_Hz" : "phase_deg");
    const auto ext = external_indices(r);
    std::vector<std::string> ext_ids;
    for (auto i : ext) ext_ids.push_back(r.port_ids[i]);
    for (auto o : ext)
        for (auto i : ext) {
            const auto label = pair_label(ext_ids, r.port_ids[o], r.port_ids[i]);
            csv.header.push_back(label + "_dB");
            csv.header.push_back(label + "_deg");
        }
    for (std::size_t p = 0; p < r.size(); ++p) {
        std::vector<std::string> row{fmt12(detuning ? rad_to_hz(r.axis[p]) : rad_to_deg(r.axis[p]))};
        for (auto o : ext)
            for (auto i : ext) {
                const cplx s = r.S[p](o, i);
                row.push_back(fmt12(20.0 * std::log10(std::abs(s))));
                row.push_back(fmt12(rad_to_deg(std::arg(s))));
            }
        csv.rows.push_back(std::move(row));
    }
    return csv;
}

json edges_json(const std::vector<CouplingEdge> &edges) {
    json out = json::array();
    for (const auto &e : edges)
        out.push_back({{"id", e.id},
                       {"from", e.from},
                       {"to", e.to},
                       {"kind", to_string(e.kind)},
                       {"g_Hz", rad_to_hz(e.magnitude)},
                       {"phase_deg", rad_to_deg(e.phase)},
                       {"pump_f_Hz", rad_to_hz(e.pump_freq)}});
    return out;
}

json modes_json(const std::vector<Mode> &modes) {
    json out = json::array();
    for (const auto &m : modes)
        out.push_back({{"id", m.id},
                       {"f_Hz", rad_to_hz(m.omega)},
                       {"kappa_ext_Hz", rad_to_hz(m.kappa_ext)},
                       {"kappa_int_Hz", rad_to_hz(m.kappa_int)}});
    return out;
}

// ---------------------------------------------------------------- tasks

struct TaskContext {
    const Source &src;
    const YAML::Node &task;
    const ModeNetwork &network;
    fs::path base_dir;
    std::optional<std::size_t> points;

    std::size_t n_points(std::size_t fallback) const {
        if (points) return *points;
        const long long n = opt<long long>(src, task, "points", static_cast<long long>(fallback));
        if (n < 0) fail(src, task["points"], "points must be >= 0");
        return static_cast<std::size_t>(n);
    }
    std::string probe() const {
        const auto p = opt<std::string>(src, task, "probe", network.modes().front().id);
        if (!network.find_mode(p)) fail(src, task["probe"], "unknown probe mode '" + p + "'");
        return p;
    }
    std::pair<double, double> detuning_range() const {
        const double span = 3.0 * rad_to_hz(network.max_kappa());
        const double lo = opt<double>(src, task, "delta_min_Hz", -span);
        const double hi = opt<double>(src, task, "delta_max_Hz", span);
        if (!(hi >= lo)) fail(src, task, "delta_max_Hz must be >= delta_min_Hz");
        return {hz_to_rad(lo), hz_to_rad(hi)};
    }
    fs::path data_path(const std::string &key) const {
        const fs::path p = need<std::string>(src, task, key);
        return p.is_absolute() ? p : base_dir / p;
    }
};

void mark_all_singular(TaskOutput &out, const std::vector<bool> &singular) {
    if (singular.empty()) return;
    for (bool s : singular)
        if (!s) return;
    out.numerical_failure = true;
    out.failure_message = "scattering matrix singular at every sweep point";
}

TaskOutput task_sweep(const TaskContext &ctx) {
    check_keys(ctx.src, ctx.task, {"type", "probe", "delta_min_Hz", "delta_max_Hz", "points"});
    const auto [lo, hi] = ctx.detuning_range();
    const auto r = sweep_detuning(ctx.network, ctx.probe(), lo, hi, ctx.n_points(401));
    TaskOutput out{scattering_doc(r, "sweep"), scattering_table(r)};
    out.default_format = "csv";
    mark_all_singular(out, r.singular);
    return out;
}

TaskOutput task_phase_sweep(const TaskContext &ctx) {
    const auto &src = ctx.src;
    check_keys(src, ctx.task,
               {"type", "edge", "cycle", "phase_min_deg", "phase_max_deg", "points", "probe", "delta_Hz"});
    const auto edge = need<std::string>(src, ctx.task, "edge");
    if (!ctx.network.find_edge(edge)) fail(src, ctx.task["edge"], "unknown edge '" + edge + "'");
    const auto cycle = opt<std::vector<std::string>>(src, ctx.task, "cycle", {});
    const double lo = deg_to_rad(opt<double>(src, ctx.task, "phase_min_deg", -180.0));
    const double hi = deg_to_rad(opt<double>(src, ctx.task, "phase_max_deg", 180.0));
    ScatteringResult r;
    try {
        r = sweep_loop_phase(ctx.network, edge, lo, hi, ctx.n_points(361), cycle, ctx.probe(),
                             hz_to_rad(opt<double>(src, ctx.task, "delta_Hz", 0.0)));
    } catch (const Error &e) {
        if (e.code() == Errc::InvalidArgument) fail(src, ctx.task, e.what());
        throw;
    }
    TaskOutput out{scattering_doc(r, "phase-sweep"), scattering_table(r)};
    out.doc["axis"]["name"] = cycle.empty() ? "edge_phase" : "loop_phase";
    out.default_format = "csv";
    mark_all_singular(out, r.singular);
    return out;
}

TaskOutput task_noise(const TaskContext &ctx) {
    const auto &src = ctx.src;
    check_keys(src, ctx.task, {"type", "probe", "delta_min_Hz", "delta_max_Hz", "points", "gain_pair"});
    const auto [lo, hi] = ctx.detuning_range();
    const auto r = noise_sweep(ctx.network, ctx.probe(), lo, hi, ctx.n_points(201));
    std::optional<std::pair<std::string, std::string>> pair;
    if (ctx.task["gain_pair"]) {
        const auto v = need<std::vector<std::string>>(src, ctx.task, "gain_pair");
        if (v.size() != 2) fail(src, ctx.task["gain_pair"], "gain_pair is [output, input]");
        for (const auto &p : v)
            if (!ctx.network.find_port(p)) fail(src, ctx.task["gain_pair"], "unknown port '" + p + "'");
        pair.emplace(v[0], v[1]);
    }
    const auto ext = ctx.network.external_ports();
    std::vector<std::string> ext_ids;
    for (auto i : ext) ext_ids.push_back(r.port_ids[i]);

    Csv csv;
    csv.header.push_back("delta_Hz");
    for (const auto &id : ext_ids) csv.header.push_back("N_" + id);
    const std::string add_label = pair ? "n_add_" + pair_label(ext_ids, pair->first, pair->second).substr(2) : "";
    if (pair) csv.header.push_back(add_label);

    json axis = json::array(), density = json::array(), added = json::array(), singular = json::array();
    for (std::size_t p = 0; p < r.size(); ++p) {
        std::vector<std::string> row{fmt12(rad_to_hz(r.axis[p]))};
        json d = json::array();
        for (auto i : ext) {
            row.push_back(fmt12(r.density[p](i)));
            d.push_back(std::isfinite(r.density[p](i)) ? json(r.density[p](i)) : json(nullptr));
        }
        if (pair) {
            double n = std::numeric_limits<double>::quiet_NaN();
            if (!r.singular[p]) {
                try {
                    n = r.added_noise(p, pair->first, pair->second);
                } catch (const Error &e) {
                    if (e.code() != Errc::GainTooSmall) throw;
                }
            }
            row.push_back(fmt12(n));
            added.push_back(std::isfinite(n) ? json(n) : json(nullptr));
        }
        csv.rows.push_back(std::move(row));
        axis.push_back(rad_to_hz(r.axis[p]));
        density.push_back(std::move(d));
        singular.push_back(bool(r.singular[p]));
    }
    TaskOutput out;
    out.doc = {{"schema", kSchema},
               {"task", "noise"},
               {"axis", {{"name", "delta"}, {"unit", "Hz"}, {"values", axis}}},
               {"ports", ext_ids},
               {"N_symmetrized", density},
               {"singular", singular}};
    if (pair) out.doc["n_add"] = {{"output", pair->first}, {"input", pair->second}, {"values", added}};
    out.csv = std::move(csv);
    out.default_format = "csv";
    mark_all_singular(out, r.singular);
    return out;
}

TaskOutput task_stability(const TaskContext &ctx) {
    const auto &src = ctx.src;
    check_keys(src, ctx.task, {"type", "probe", "threshold"});
    const auto probe = ctx.probe();
    const auto rep = determinant_roots(ctx.network, probe);
    json roots = json::array();
    Csv csv;
    csv.header = {"root_re_Hz", "root_im_Hz"};
    for (const auto &z : rep.roots) {
        roots.push_back(json::array({rad_to_hz(z.real()), rad_to_hz(z.imag())}));
        csv.rows.push_back({fmt12(rad_to_hz(z.real())), fmt12(rad_to_hz(z.imag()))});
    }
    TaskOutput out;
    out.doc = {{"schema", kSchema}, {"task", "stability"}, {"probe", probe},
               {"stable", rep.stable}, {"margin", rep.margin}, {"roots_Hz", roots}};
    if (const YAML::Node th = ctx.task["threshold"]; th) {
        check_keys(src, th, {"edges", "scale_cap"});
        const auto edges = opt<std::vector<std::string>>(src, th, "edges", {});
        for (const auto &e : edges)
            if (!ctx.network.find_edge(e)) fail(src, th["edges"], "unknown edge '" + e + "'");
        const auto t = oscillation_threshold(ctx.network, edges, probe, opt<double>(src, th, "scale_cap", 10.0));
        out.doc["threshold"] = {{"edges", edges},
                                {"scale", t.scale},
                                {"stable_bound", t.stable_bound},
                                {"unstable_bound", t.unstable_bound},
                                {"iterations", t.iterations}};
    }
    out.csv = std::move(csv);
    return out;
}

TaskOutput task_tune(const TaskContext &ctx) {
    const auto &src = ctx.src;
    check_keys(src, ctx.task, {"type", "behavior", "direction", "gain_dB", "modes"});
    TuneTarget target;
    const auto behavior = need<std::string>(src, ctx.task, "behavior");
    if (behavior == "converter")
        target.behavior = Behavior::Converter;
    else if (behavior == "circulator")
        target.behavior = Behavior::Circulator;
    else if (behavior == "directional-amplifier")
        target.behavior = Behavior::DirectionalAmplifier;
    else
        fail(src, ctx.task["behavior"], "behavior must be converter, circulator or directional-amplifier");
    const auto direction = opt<std::string>(src, ctx.task, "direction", "forward");
    if (direction != "forward" && direction != "reverse")
        fail(src, ctx.task["direction"], "direction must be forward or reverse");
    target.direction = direction == "forward" ? Direction::Forward : Direction::Reverse;
    target.gain_db = opt<double>(src, ctx.task, "gain_dB", 0.0);
    if (target.behavior == Behavior::DirectionalAmplifier && !(target.gain_db > 0.0))
        fail(src, ctx.task, "directional-amplifier target needs gain_dB > 0");
    target.modes = opt<std::vector<std::string>>(src, ctx.task, "modes", {});

    std::vector<CouplingEdge> edges;
    try {
        edges = tune(ctx.network.modes(), target);
    } catch (const Error &e) {
        fail(src, ctx.task, e.what());
    }
    TaskOutput out;
    out.doc = {{"schema", kSchema},
               {"task", "tune"},
               {"behavior", behavior},
               {"direction", direction},
               {"network", {{"modes", modes_json(ctx.network.modes())}, {"edges", edges_json(edges)}}}};
    if (target.behavior == Behavior::DirectionalAmplifier) out.doc["gain_dB"] = target.gain_db;
    json net = {{"network", out.doc["network"]}};
    out.yaml = to_yaml(net);
    out.default_format = "yaml";
    return out;
}

struct ConfigParam {
    std::string api_name;
    double factor;  // config unit -> API unit
};

ConfigParam map_param(const Source &src, const YAML::Node &node, const std::string &name) {
    const auto dot = name.find('.');
    const std::string head = name.substr(0, dot);
    const std::string tail = dot == std::string::npos ? "" : name.substr(dot + 1);
    if (head == "f") return {"omega." + tail, kTwoPi};
    if (head == "kappa") return {"kappa." + tail, kTwoPi};
    if (head == "eta" || head == "beta") return {name, 1.0};
    if (head == "phase") return {name, kPi / 180.0};
    fail(src, node, "unknown fit parameter '" + name + "' (use f., kappa., eta., beta., phase.)");
}

TaskOutput task_fit(const TaskContext &ctx) {
    const auto &src = ctx.src;
    check_keys(src, ctx.task, {"type", "data", "probe", "use_phase", "parameters"});
    FitProblem problem{ctx.network};
    problem.probe_mode = ctx.probe();
    problem.use_phase = opt<bool>(src, ctx.task, "use_phase", false);
    std::vector<std::string> port_ids;
    for (const auto &p : ctx.network.ports()) port_ids.push_back(p.id);
    try {
        problem.traces = traces_from_table(read_table_file(ctx.data_path("data").string()), port_ids);
    } catch (const Error &e) {
        fail(src, ctx.task["data"], e.what());
    }

    const YAML::Node params = ctx.task["parameters"];
    if (!params || !params.IsSequence() || params.size() == 0)
        fail(src, ctx.task, "fit needs a non-empty 'parameters' list");
    std::vector<ConfigParam> mapping;
    for (const auto &p : params) {
        check_keys(src, p, {"name", "initial", "lower", "upper"});
        const auto name = need<std::string>(src, p, "name");
        const auto cp = map_param(src, p, name);
        double current = 0.0;
        try {
            current = parameter_value(ctx.network, cp.api_name) / cp.factor;
        } catch (const Error &e) {
            fail(src, p, e.what());
        }
        const bool unit = name.starts_with("eta.") || name.starts_with("beta.");
        const bool phase = name.starts_with("phase.");
        if (!unit && !phase && (!p["lower"] || !p["upper"]))
            fail(src, p, "parameter '" + name + "' needs 'lower' and 'upper' bounds");
        const double lower = opt<double>(src, p, "lower", phase ? -360.0 : 0.0);
        const double upper = opt<double>(src, p, "upper", phase ? 360.0 : 1.0);
        problem.parameters.push_back(
            {cp.api_name, opt<double>(src, p, "initial", current) * cp.factor, lower * cp.factor, upper * cp.factor});
        mapping.push_back(cp);
    }

    const FitResult fit = fit_sweep(problem);
    json values = json::array();
    Csv csv;
    csv.header = {"name", "value", "std_error"};
    for (std::size_t i = 0; i < mapping.size(); ++i) {
        const auto name = params[i]["name"].as<std::string>();
        const double v = fit.values(static_cast<Eigen::Index>(i)) / mapping[i].factor;
        const double s = fit.std_error(static_cast<Eigen::Index>(i)) / mapping[i].factor;
        values.push_back({{"name", name}, {"value", v}, {"std_error", std::isfinite(s) ? json(s) : json(nullptr)}});
        csv.rows.push_back({name, fmt12(v), fmt12(s)});
    }
    TaskOutput out;
    out.doc = {{"schema", kSchema},   {"task", "fit"},          {"converged", fit.converged},
               {"status", fit.status}, {"iterations", fit.iterations}, {"n_points", fit.n_points},
               {"residual_norm", fit.residual_norm}, {"parameters", values}};
    out.csv = std::move(csv);
    return out;
}

TaskOutput task_calibrate(const TaskContext &ctx) {
    const auto &src = ctx.src;
    check_keys(src, ctx.task, {"type", "data", "f_Hz", "initial"});
    Table table;
    try {
        table = read_table_file(ctx.data_path("data").string());
        table.column("V_volts");
        table.column("N_meas");
    } catch (const Error &e) {
        fail(src, ctx.task["data"], e.what());
    }
    CalibrationGuess guess;
    if (const YAML::Node g = ctx.task["initial"]; g) {
        check_keys(src, g, {"gain", "n_add", "T_K"});
        guess.gain = opt<double>(src, g, "gain", guess.gain);
        guess.n_add = opt<double>(src, g, "n_add", guess.n_add);
        guess.temperature = opt<double>(src, g, "T_K", guess.temperature);
    }
    const double omega = hz_to_rad(need<double>(src, ctx.task, "f_Hz"));
    CalibrationRecord rec;
    try {
        rec = calibrate_system(table.column("V_volts"), table.column("N_meas"), omega, guess);
    } catch (const Error &e) {
        if (e.code() == Errc::InvalidArgument) fail(src, ctx.task, e.what());
        throw;
    }
    TaskOutput out;
    out.doc = {{"schema", kSchema},
               {"task", "calibrate"},
               {"f_Hz", rad_to_hz(rec.omega)},
               {"gain", rec.gain},
               {"n_add", rec.n_add},
               {"T_K", rec.temperature},
               {"gain_error", rec.gain_error},
               {"n_add_error", rec.n_add_error},
               {"T_K_error", rec.temperature_error},
               {"residual_norm", rec.residual_norm},
               {"iterations", rec.iterations}};
    Csv csv;
    csv.header = {"f_Hz", "gain", "n_add", "T_K"};
    csv.rows.push_back({fmt12(rad_to_hz(rec.omega)), fmt12(rec.gain), fmt12(rec.n_add), fmt12(rec.temperature)});
    out.csv = std::move(csv);
    return out;
}

TaskOutput task_collision(const TaskContext &ctx) {
    const auto &src = ctx.src;
    check_keys(src, ctx.task, {"type", "guard_factor", "flux_curve", "flux_bias"});
    const double guard = opt<double>(src, ctx.task, "guard_factor", 3.0);
    if (!(guard > 0.0)) fail(src, ctx.task["guard_factor"], "guard_factor must be positive");
    auto modes = ctx.network.modes();
    if (ctx.task["flux_curve"]) {
        FluxCurve curve;
        try {
            const Table t = read_table_file(ctx.data_path("flux_curve").string());
            curve.flux = t.column("flux");
            curve.omega.resize(static_cast<Eigen::Index>(t.rows()), static_cast<Eigen::Index>(modes.size()));
            for (std::size_t j = 0; j < modes.size(); ++j) {
                curve.mode_ids.push_back(modes[j].id);
                const auto &col = t.column("f_" + modes[j].id + "_Hz");
                for (std::size_t i = 0; i < col.size(); ++i)
                    curve.omega(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = hz_to_rad(col[i]);
            }
            const VectorXd w = flux_frequencies(curve, need<double>(src, ctx.task, "flux_bias"));
            for (std::size_t j = 0; j < modes.size(); ++j) modes[j].omega = w(static_cast<Eigen::Index>(j));
        } catch (const Error &e) {
            fail(src, ctx.task["flux_curve"], e.what());
        }
    }
    const auto hits = collision_check(modes, guard);
    json list = json::array();
    Csv csv;
    csv.header = {"first", "second", "first_Hz", "second_Hz", "separation_Hz"};
    for (const auto &c : hits) {
        list.push_back({{"first", c.first},
                        {"second", c.second},
                        {"first_Hz", rad_to_hz(c.first_freq)},
                        {"second_Hz", rad_to_hz(c.second_freq)},
                        {"separation_Hz", rad_to_hz(c.separation)}});
        csv.rows.push_back({c.first, c.second, fmt12(rad_to_hz(c.first_freq)), fmt12(rad_to_hz(c.second_freq)),
                            fmt12(rad_to_hz(c.separation))});
    }
    double kmax = 0.0;
    for (const auto &m : modes) kmax = std::max(kmax, m.kappa());
    TaskOutput out;
    out.doc = {{"schema", kSchema},
               {"task", "collision-check"},
               {"guard_Hz", rad_to_hz(guard * kmax)},
               {"mode_f_Hz", modes_json(modes)},
               {"collisions", list}};
    out.csv = std::move(csv);
    return out;
}

bool is_numerical(Errc code) {
    switch (code) {
    case Errc::SingularMatrix:
    case Errc::NonConvergence:
    case Errc::DegenerateProblem:
    case Errc::NoThresholdFound:
    case Errc::GainTooSmall: return true;
    default: return false;
    }
}

YAML::Node load_yaml(const std::string &path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path + ": cannot open config file");
    try {
        return YAML::Load(in);
    } catch (const YAML::ParserException &e) {
        throw ConfigError(path + ":" + std::to_string(e.mark.line + 1) + ": " + e.msg);
    }
}

std::string choose_format(const RunOptions &opt, const Source &src, const YAML::Node &output,
                          const std::string &path, const TaskOutput &result) {
    std::string f;
    if (opt.format)
        f = *opt.format;
    else if (output && output["format"])
        f = as<std::string>(src, output["format"], "format");
    else if (!path.empty() && path != "-") {
        const auto ext = fs::path(path).extension().string();
        if (ext == ".csv") f = "csv";
        if (ext == ".json") f = "json";
        if (ext == ".yaml" || ext == ".yml") f = "yaml";
    }
    if (f.empty()) f = result.default_format;
    if (f != "csv" && f != "json" && f != "yaml") throw ConfigError("unknown output format '" + f + "'");
    if (f == "csv" && !result.csv) throw ConfigError("this task has no CSV output; use json or yaml");
    return f;
}

}  // namespace

void apply_override(YAML::Node &root, const std::string &assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + assignment + "' is not key=value");
    const std::string key = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    std::vector<std::string> parts;
    std::stringstream ss(key);
    for (std::string seg; std::getline(ss, seg, '.');) {
        if (seg.empty()) throw ConfigError("override key '" + key + "' has an empty segment");
        parts.push_back(seg);
    }
    YAML::Node cur = root;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        const auto &seg = parts[i];
        YAML::Node next;
        if (cur.IsSequence()) {
            bool found = false;
            for (std::size_t k = 0; k < cur.size(); ++k) {
                const bool by_index = seg.find_first_not_of("0123456789") == std::string::npos && std::stoul(seg) == k;
                const bool by_id = cur[k].IsMap() && cur[k]["id"] && cur[k]["id"].as<std::string>() == seg;
                if (by_index || by_id) {
                    next.reset(cur[k]);
                    found = true;
                    break;
                }
            }
            if (!found) throw ConfigError("override key '" + key + "': no element '" + seg + "'");
            if (i + 1 == parts.size()) {
                next = YAML::Load(value);
                return;
            }
        } else {
            if (cur.IsScalar()) throw ConfigError("override key '" + key + "' descends into a scalar");
            if (i + 1 == parts.size()) {
                cur[seg] = YAML::Load(value);
                return;
            }
            next.reset(cur[seg]);
        }
        cur.reset(next);
    }
}

ModeNetwork parse_network(const YAML::Node &network, const std::string &source) {
    Source src{source, {}};
    return parse_network_impl(network, src);
}

std::string scattering_csv(const ScatteringResult &result) { return scattering_table(result).str(); }

std::string scattering_json(const ScatteringResult &result) {
    return scattering_doc(result, "sweep").dump(2) + "\n";
}

std::string edges_yaml(const std::vector<CouplingEdge> &edges) {
    return to_yaml(json{{"edges", edges_json(edges)}});
}

void write_atomic(const std::string &path, const std::string &content) {
    const fs::path target(path);
    const fs::path tmp = target.string() + ".tmp" + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error(Errc::IOError, "cannot write '" + tmp.string() + "'", path);
        os << content;
        os.flush();
        if (!os) throw Error(Errc::IOError, "write failed for '" + tmp.string() + "'", path);
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw Error(Errc::IOError, "cannot move output into place at '" + path + "'", path);
    }
}

int run(const RunOptions &options, std::ostream &out, std::ostream &err) {
    try {
        YAML::Node root = load_yaml(options.config_path);
        for (const auto &o : options.overrides) apply_override(root, o);
        Source src{options.config_path, {}};
        if (!root.IsMap()) throw ConfigError(options.config_path + ": config must be a mapping");
        check_keys(src, root, {"network", "task", "output"});
        if (!root["network"]) fail(src, root, "missing 'network' section");
        if (!root["task"]) fail(src, root, "missing 'task' section");
        const ModeNetwork network = parse_network_impl(root["network"], src);

        const YAML::Node task = root["task"];
        const auto type = need<std::string>(src, task, "type");
        const fs::path base = fs::path(options.config_path).parent_path();
        TaskContext ctx{src, task, network, base, options.points};

        TaskOutput result;
        if (type == "sweep")
            result = task_sweep(ctx);
        else if (type == "phase-sweep")
            result = task_phase_sweep(ctx);
        else if (type == "noise")
            result = task_noise(ctx);
        else if (type == "stability")
            result = task_stability(ctx);
        else if (type == "tune")
            result = task_tune(ctx);
        else if (type == "fit")
            result = task_fit(ctx);
        else if (type == "calibrate")
            result = task_calibrate(ctx);
        else if (type == "collision-check")
            result = task_collision(ctx);
        else
            fail(src, task["type"], "unknown task type '" + type + "'");

        const YAML::Node output = root["output"];
        if (output) check_keys(src, output, {"path", "format"});
        std::string path;
        if (options.output) {
            path = *options.output;
        } else if (output && output["path"]) {
            const fs::path p = as<std::string>(src, output["path"], "path");
            path = (p.is_absolute() ? p : base / p).string();
        }
        const auto format = choose_format(options, src, output, path, result);
        std::string content;
        if (format == "csv")
            content = result.csv->str();
        else if (format == "json")
            content = result.doc.dump(2) + "\n";
        else
            content = result.yaml ? *result.yaml : to_yaml(result.doc);

        if (path.empty() || path == "-") {
            out << content;
        } else {
            write_atomic(path, content);
            if (!options.quiet) err << "paranet: " << type << " -> " << path << " (" << format << ")\n";
        }
        if (result.numerical_failure) {
            err << "paranet: numerical failure: " << result.failure_message << "\n";
            return kNumericalFailure;
        }
        return kSuccess;
    } catch (const ConfigError &e) {
        err << "paranet: error: " << e.what() << "\n";
        return kValidationError;
    } catch (const Error &e) {
        err << "paranet: " << (is_numerical(e.code()) ? "numerical failure" : "error") << " ["
            << errc_name(e.code()) << "]: " << e.what() << "\n";
        return is_numerical(e.code()) ? kNumericalFailure : kValidationError;
    } catch (const YAML::Exception &e) {
        err << "paranet: error: " << options.config_path << ":" << e.mark.line + 1 << ": " << e.msg << "\n";
        return kValidationError;
    }
}

}  // namespace paranet::cli
