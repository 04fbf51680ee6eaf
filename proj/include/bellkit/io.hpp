#pragma once

// JSON forms of behaviors, Bell functionals and LP certificates.
//
// Behavior file: {"scenario": {"parties": n, "inputs": [...], "outputs": [...]},
//                 "p": ["a/b", ...]}                       (layout of scenario.hpp)
// Bell file:     {"m": m, "row": [...], "col": [...], "body": [[...]],
//                 "bound": "a/b", "name": "..."}           (CG table)
//            or  {"scenario": {...}, "coeffs": [...], "bound": "a/b", "name": "..."}
// Rationals are strings "a/b" or integer strings; bare JSON integers are also
// accepted. Floating-point numbers are rejected.

#include "bellkit/bell.hpp"
#include "bellkit/behavior.hpp"
#include "bellkit/lp.hpp"
#include "bellkit/rational.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace bellkit {

using Json = nlohmann::json;

namespace detail {

inline const Json& field(const Json& j, const std::string& key, const std::string& where) {
    if (!j.is_object()) throw ParseError(where + ": expected an object");
    auto it = j.find(key);
    if (it == j.end()) throw ParseError(where + ": missing field \"" + key + "\"");
    return *it;
}

inline std::size_t count_field(const Json& j, const std::string& where) {
    if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<long long>() >= 0))
        throw ParseError(where + ": expected a nonnegative integer");
    return j.get<std::size_t>();
}

inline std::vector<std::size_t> count_list(const Json& j, const std::string& where) {
    if (!j.is_array()) throw ParseError(where + ": expected an array");
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(count_field(j[i], where + "[" + std::to_string(i) + "]"));
    return out;
}

} // namespace detail

inline Json rational_to_json(const Rational& r) { return r.get_str(); }

inline Rational rational_from_json(const Json& j, const std::string& where) {
    if (j.is_string()) {
        try {
            return parse_rational(j.get<std::string>());
        } catch (const ParseError& e) {
            throw ParseError(where + ": " + e.what());
        }
    }
    if (j.is_number_integer()) return Rational(mpz_class(std::to_string(j.get<long long>())));
    throw ParseError(where + ": expected a rational string \"a/b\"");
}

inline Json vector_to_json(const RationalVector& v) {
    Json a = Json::array();
    for (const auto& r : v) a.push_back(r.get_str());
    return a;
}

inline RationalVector vector_from_json(const Json& j, const std::string& where) {
    if (!j.is_array()) throw ParseError(where + ": expected an array of rationals");
    RationalVector v;
    v.reserve(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v.push_back(rational_from_json(j[i], where + "[" + std::to_string(i) + "]"));
    return v;
}

inline Json scenario_to_json(const Scenario& s) {
    return {{"parties", s.parties()}, {"inputs", s.inputs()}, {"outputs", s.outputs()}};
}

inline Scenario scenario_from_json(const Json& j, const std::string& where) {
    const std::size_t n = detail::count_field(detail::field(j, "parties", where), where + ".parties");
    auto in = detail::count_list(detail::field(j, "inputs", where), where + ".inputs");
    auto out = detail::count_list(detail::field(j, "outputs", where), where + ".outputs");
    if (in.size() != n || out.size() != n) throw ParseError(where + ": inputs/outputs lists must have one entry per party");
    try {
        return Scenario(std::move(in), std::move(out));
    } catch (const StructuralError& e) {
        throw ParseError(where + ": " + e.what());
    }
}

inline Json behavior_to_json(const Behavior& b) {
    return {{"scenario", scenario_to_json(b.scenario())}, {"p", vector_to_json(b.p())}};
}

/// Dimension mismatches surface as StructuralError, everything else as ParseError.
inline Behavior behavior_from_json(const Json& j, const std::string& where = "behavior") {
    Scenario s = scenario_from_json(detail::field(j, "scenario", where), where + ".scenario");
    return Behavior(std::move(s), vector_from_json(detail::field(j, "p", where), where + ".p"));
}

inline Json cg_to_json(const CgTable& t) {
    Json body = Json::array();
    for (const auto& r : t.body) body.push_back(vector_to_json(r));
    return {{"m", t.m},       {"row", vector_to_json(t.row)}, {"col", vector_to_json(t.col)},
            {"body", body},   {"bound", t.bound.get_str()},   {"name", t.name}};
}

inline CgTable cg_from_json(const Json& j, const std::string& where = "bell") {
    CgTable t;
    t.m = detail::count_field(detail::field(j, "m", where), where + ".m");
    t.row = vector_from_json(detail::field(j, "row", where), where + ".row");
    t.col = vector_from_json(detail::field(j, "col", where), where + ".col");
    const Json& body = detail::field(j, "body", where);
    if (!body.is_array()) throw ParseError(where + ".body: expected an array of rows");
    for (std::size_t u = 0; u < body.size(); ++u)
        t.body.push_back(vector_from_json(body[u], where + ".body[" + std::to_string(u) + "]"));
    t.bound = rational_from_json(detail::field(j, "bound", where), where + ".bound");
    if (auto it = j.find("name"); it != j.end() && it->is_string()) t.name = it->get<std::string>();
    try {
        t.check();
    } catch (const StructuralError& e) {
        throw ParseError(where + ": " + e.what());
    }
    return t;
}

inline Json functional_to_json(const BellFunctional& f) {
    return {{"scenario", scenario_to_json(f.scenario())},
            {"coeffs", vector_to_json(f.coeffs())},
            {"bound", f.bound().get_str()},
            {"name", f.name()}};
}

/// Accepts either a CG table or a full coefficient vector.
inline BellFunctional functional_from_json(const Json& j, const std::string& where = "bell") {
    if (j.is_object() && j.contains("m")) return cg_to_functional(cg_from_json(j, where));
    Scenario s = scenario_from_json(detail::field(j, "scenario", where), where + ".scenario");
    RationalVector c = vector_from_json(detail::field(j, "coeffs", where), where + ".coeffs");
    Rational bound = rational_from_json(detail::field(j, "bound", where), where + ".bound");
    std::string name;
    if (auto it = j.find("name"); it != j.end() && it->is_string()) name = it->get<std::string>();
    return BellFunctional(std::move(s), std::move(c), std::move(bound), std::move(name));
}

inline Json solution_to_json(const LpSolution& s) {
    Json j = {{"status", to_string(s.status)}};
    if (s.status == LpStatus::Optimal) {
        j["value"] = s.value.get_str();
        j["primal"] = vector_to_json(s.primal);
        j["dual"] = vector_to_json(s.dual);
    } else if (s.status == LpStatus::Infeasible) {
        j["farkas"] = vector_to_json(s.farkas);
    }
    return j;
}

inline LpSolution solution_from_json(const Json& j, const std::string& where = "certificate") {
    LpSolution s;
    const Json& status = detail::field(j, "status", where);
    const std::string st = status.is_string() ? status.get<std::string>() : "";
    if (st == "optimal") {
        s.status = LpStatus::Optimal;
        s.value = rational_from_json(detail::field(j, "value", where), where + ".value");
        s.primal = vector_from_json(detail::field(j, "primal", where), where + ".primal");
        s.dual = vector_from_json(detail::field(j, "dual", where), where + ".dual");
    } else if (st == "infeasible") {
        s.status = LpStatus::Infeasible;
        s.farkas = vector_from_json(detail::field(j, "farkas", where), where + ".farkas");
    } else if (st == "unbounded") {
        s.status = LpStatus::Unbounded;
    } else {
        throw ParseError(where + ".status: expected optimal, infeasible or unbounded");
    }
    return s;
}

/// Reads and parses a JSON document; syntax errors carry the byte offset.
inline Json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path + ": cannot open file");
    std::stringstream buf;
    buf << in.rdbuf();
    try {
        return Json::parse(buf.str());
    } catch (const Json::parse_error& e) {
        throw ParseError(path + ": invalid JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
}

inline void write_json_file(const std::string& path, const Json& j) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error(path + ": cannot write file");
    out << j.dump(2) << '\n';
}

inline Behavior read_behavior_file(const std::string& path) { return behavior_from_json(read_json_file(path), path); }
inline BellFunctional read_bell_file(const std::string& path) { return functional_from_json(read_json_file(path), path); }

} // namespace bellkit
