#pragma once

#include <cstdio>
#include <fstream>
#include <iterator>
#include <ostream>
#include <set>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

#include "cycdde/error.hpp"
#include "cycdde/feedback.hpp"
#include "cycdde/genenet.hpp"
#include "cycdde/integrator.hpp"
#include "cycdde/lyapunov.hpp"
#include "cycdde/orbit.hpp"
#include "cycdde/spectral.hpp"
#include "cycdde/steady.hpp"
#include "cycdde/system.hpp"

namespace cycdde {

using json = nlohmann::json;
using SystemSpec = std::variant<UnidirectionalSystem, CyclicSystem, GeneNetwork>;

namespace detail {

inline void reject_unknown(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!ok.count(it.key())) throw ArgumentError(where + ": unknown field '" + it.key() + "'");
}

inline const json& require(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) throw ArgumentError(where + ": missing field '" + key + "'");
    return j.at(key);
}

inline double number(const json& j, const std::string& what) {
    if (!j.is_number()) throw ArgumentError(what + " must be a number");
    return j.get<double>();
}

inline std::vector<double> numbers(const json& j, const std::string& what) {
    if (!j.is_array()) throw ArgumentError(what + " must be an array of numbers");
    std::vector<double> out;
    for (const auto& v : j) out.push_back(number(v, what));
    return out;
}

inline Nonlinearity parse_nonlinearity(const json& j, const std::string& where) {
    if (!j.is_object()) throw ArgumentError(where + " must be an object");
    reject_unknown(j, {"kind", "gain", "slope", "nu", "shift"}, where);
    const json& kind = require(j, "kind", where);
    if (!kind.is_string()) throw ArgumentError(where + ".kind must be a string");
    Nonlinearity f;
    f.kind = nonlinearity_kind_from_string(kind.get<std::string>());
    if (j.contains("gain")) f.gain = number(j["gain"], where + ".gain");
    if (j.contains("slope")) f.slope = number(j["slope"], where + ".slope");
    if (j.contains("nu")) f.nu = number(j["nu"], where + ".nu");
    if (j.contains("shift")) f.shift = number(j["shift"], where + ".shift");
    f.validate();
    return f;
}

inline std::vector<Nonlinearity> parse_nonlinearities(const json& j, const std::string& where) {
    if (!j.is_array()) throw ArgumentError(where + " must be an array");
    std::vector<Nonlinearity> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_nonlinearity(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

inline HillKind hill_kind_from_string(const std::string& s) {
    if (s == "increasing") return HillKind::increasing;
    if (s == "decreasing") return HillKind::decreasing;
    throw ArgumentError("f_kind entries must be 'increasing' or 'decreasing', got '" + s + "'");
}

}  // namespace detail

inline SystemSpec parse_system_spec(const json& j) {
    if (!j.is_object()) throw ArgumentError("system spec must be a JSON object");
    const json& type = detail::require(j, "type", "system spec");
    if (!type.is_string()) throw ArgumentError("system spec: 'type' must be a string");
    const std::string t = type.get<std::string>();
    if (t == "unidirectional") {
        detail::reject_unknown(j, {"type", "tau", "mu", "g"}, "unidirectional spec");
        return UnidirectionalSystem(detail::numbers(detail::require(j, "mu", t), "mu"),
                                    detail::parse_nonlinearities(detail::require(j, "g", t), "g"),
                                    detail::number(detail::require(j, "tau", t), "tau"));
    }
    if (t == "cyclic") {
        detail::reject_unknown(j, {"type", "tau", "mu", "g", "g_prev"}, "cyclic spec");
        const auto mu = detail::numbers(detail::require(j, "mu", t), "mu");
        const auto g = detail::parse_nonlinearities(detail::require(j, "g", t), "g");
        if (mu.size() != g.size()) throw ArgumentError("cyclic spec: mu and g differ in length");
        std::vector<CyclicComponent> comps;
        for (std::size_t i = 0; i < mu.size(); ++i) comps.push_back({mu[i], std::nullopt, g[i]});
        if (j.contains("g_prev")) {
            const json& gp = j["g_prev"];
            if (!gp.is_array() || gp.size() != mu.size())
                throw ArgumentError("cyclic spec: g_prev must be an array with one entry per component");
            for (std::size_t i = 0; i < gp.size(); ++i) {
                if (gp[i].is_null()) continue;
                if (i == 0) throw ArgumentError("cyclic spec: component 0 has no prev coupling (g_prev[0] must be null)");
                comps[i].prev = detail::parse_nonlinearity(gp[i], "g_prev[" + std::to_string(i) + "]");
            }
        }
        return CyclicSystem(std::move(comps), detail::number(detail::require(j, "tau", t), "tau"));
    }
    if (t == "gene") {
        detail::reject_unknown(j, {"type", "a", "b", "beta", "c", "nu", "f_kind", "tau_p", "tau_r"}, "gene spec");
        GeneNetwork net;
        net.a = detail::numbers(detail::require(j, "a", t), "a");
        net.b = detail::numbers(detail::require(j, "b", t), "b");
        net.beta = detail::numbers(detail::require(j, "beta", t), "beta");
        net.c = detail::numbers(detail::require(j, "c", t), "c");
        net.nu = detail::numbers(detail::require(j, "nu", t), "nu");
        net.tau_p = detail::numbers(detail::require(j, "tau_p", t), "tau_p");
        net.tau_r = detail::numbers(detail::require(j, "tau_r", t), "tau_r");
        const json& fk = detail::require(j, "f_kind", t);
        if (!fk.is_array()) throw ArgumentError("f_kind must be an array of strings");
        for (const auto& v : fk) {
            if (!v.is_string()) throw ArgumentError("f_kind must be an array of strings");
            net.f_kind.push_back(detail::hill_kind_from_string(v.get<std::string>()));
        }
        net.validate();
        return net;
    }
    throw ArgumentError("system spec: unknown type '" + t + "'");
}

inline SystemSpec parse_system_spec(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ArgumentError(std::string("malformed JSON: ") + e.what());
    }
    return parse_system_spec(j);
}

inline SystemSpec load_system_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ArgumentError("cannot open '" + path + "'");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return parse_system_spec(text);
}

inline json to_json(const Nonlinearity& f) {
    return {{"kind", to_string(f.kind)}, {"gain", f.gain}, {"slope", f.slope}, {"nu", f.nu}, {"shift", f.shift}};
}

inline json to_json(const UnidirectionalSystem& s) {
    json g = json::array();
    for (const auto& f : s.g()) g.push_back(to_json(f));
    return {{"type", "unidirectional"}, {"tau", s.tau()}, {"mu", s.mu()}, {"g", g}};
}

inline json to_json(const GeneNetwork& n) {
    json fk = json::array();
    for (auto k : n.f_kind) fk.push_back(k == HillKind::increasing ? "increasing" : "decreasing");
    return {{"type", "gene"}, {"a", n.a},   {"b", n.b},         {"beta", n.beta},  {"c", n.c},
            {"nu", n.nu},     {"f_kind", fk}, {"tau_p", n.tau_p}, {"tau_r", n.tau_r}};
}

inline json to_json(const IntervalBox& box) {
    json iv = json::array();
    for (const auto& [lo, hi] : box.intervals) iv.push_back({lo, hi});
    return {{"intervals", iv}};
}

inline json to_json(const SpectrumReport& r) {
    json roots = json::array();
    for (const auto& z : r.roots) {
        json e = {{"re", z.value.real()}, {"im", z.value.imag()}, {"residual", z.residual}};
        if (z.multiplicity != 1) e["multiplicity"] = z.multiplicity;
        if (z.merged) e["merged"] = true;
        roots.push_back(e);
    }
    json out = {{"window", {r.window.re_lo, r.window.re_hi, r.window.im_lo, r.window.im_hi}},
                {"roots", roots},
                {"sigma", r.sigma},
                {"a1_holds", r.a1_holds}};
    if (r.leading) {
        out["leading"] = {{"re", r.leading->lambda.real()},
                          {"im", r.leading->lambda.imag()},
                          {"kind", r.leading->complex_pair ? "complex_pair" : "leading_real"}};
    } else {
        out["leading"] = nullptr;
    }
    out["K_u"] = r.K_u ? json(*r.K_u) : json(nullptr);
    out["K_c"] = r.K_c ? json(*r.K_c) : json(nullptr);
    out["omega1"] = r.omega1 ? json(*r.omega1) : json(nullptr);
    if (!r.a1_reason.empty()) out["a1_reason"] = r.a1_reason;
    return out;
}

inline json to_json(const FeedbackReport& r) {
    json parts = json::array();
    for (const auto& p : r.partials)
        parts.push_back({{"component", p.component},
                         {"partial", p.partial},
                         {"min", p.min},
                         {"max", p.max},
                         {"required", to_string(p.required)},
                         {"pass", p.pass},
                         {"saturated", p.saturated}});
    return {{"pass", r.pass}, {"partials", parts}, {"diagnostics", r.diagnostics}};
}

inline json to_json(const OrbitReport& r) {
    json cr = json::array();
    for (const auto& c : r.crossings) cr.push_back({c.t, c.s});
    json ver = {{"v_equals_one", r.verification.v_equals_one},
                {"in_box", r.verification.in_box ? json(*r.verification.in_box) : json(nullptr)},
                {"periodicity_residual",
                 std::isfinite(r.verification.periodicity_residual) ? json(r.verification.periodicity_residual)
                                                                     : json(nullptr)},
                {"simple_curve", r.verification.simple_curve},
                {"simple_curve_gap", r.verification.simple_curve_gap}};
    json out = {{"converged", r.converged}, {"period", r.converged ? json(r.period) : json(nullptr)},
                {"crossings", cr},         {"verification", ver},
                {"projection", r.projection}, {"trend", r.trend},
                {"horizon", r.horizon},    {"amplitude", r.amplitude}};
    if (!r.diagnostics.empty()) out["diagnostics"] = r.diagnostics;
    return out;
}

namespace detail {

inline void put_number(std::ostream& os, double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    os << buf;
}

}  // namespace detail

/// One row per node from t_start on: t,x0,...,xN.
inline void write_trajectory_csv(std::ostream& os, const Trajectory& tr) {
    os << "t";
    for (std::size_t i = 0; i < tr.dimension(); ++i) os << ",x" << i;
    os << '\n';
    for (std::size_t k = tr.start_node(); k < tr.node_count(); ++k) {
        detail::put_number(os, tr.node_time(k));
        for (std::size_t i = 0; i < tr.dimension(); ++i) {
            os << ',';
            detail::put_number(os, tr.record().value(k, i));
        }
        os << '\n';
    }
}

/// t,r1,p1,...,rn,pn from t = 0 on.
inline void write_gene_trajectory_csv(std::ostream& os, const GeneTrajectory& tr) {
    const std::size_t n = tr.network().size();
    os << "t";
    for (std::size_t i = 1; i <= n; ++i) os << ",r" << i << ",p" << i;
    os << '\n';
    const auto& rec = tr.record();
    for (std::size_t k = tr.start_node(); k < rec.size(); ++k) {
        detail::put_number(os, k == tr.start_node() ? 0.0 : rec.time(k));
        for (std::size_t v = 0; v < 2 * n; ++v) {
            os << ',';
            detail::put_number(os, rec.value(k, v));
        }
        os << '\n';
    }
}

/// phase,t,x0,...,xN over one period.
inline void write_orbit_csv(std::ostream& os, const OrbitReport& r) {
    const std::size_t dim = r.curve.empty() ? 0 : r.curve.front().size();
    os << "phase,t";
    for (std::size_t i = 0; i < dim; ++i) os << ",x" << i;
    os << '\n';
    for (std::size_t k = 0; k < r.curve.size(); ++k) {
        detail::put_number(os, static_cast<double>(k) / static_cast<double>(r.curve.size()));
        os << ',';
        detail::put_number(os, r.curve_times[k]);
        for (double v : r.curve[k]) {
            os << ',';
            detail::put_number(os, v);
        }
        os << '\n';
    }
}

/// Initial state file: {"history": [values on a uniform grid over [-tau, 0]], "tail": [...]}.
inline SystemState parse_initial_state(const json& j, double tau) {
    if (!j.is_object()) throw ArgumentError("initial state must be a JSON object");
    detail::reject_unknown(j, {"history", "tail"}, "initial state");
    auto hist = detail::numbers(detail::require(j, "history", "initial state"), "history");
    auto tail = j.contains("tail") ? detail::numbers(j["tail"], "tail") : std::vector<double>{};
    if (hist.size() < 2) throw ArgumentError("initial state: history needs at least two samples");
    return SystemState::from_samples(tau, std::move(hist), std::move(tail));
}

}  // namespace cycdde
