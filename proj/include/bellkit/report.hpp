#pragma once

// JSON analysis reports and their re-verification.
//
// Every report embeds its exact inputs, results and LP certificates. recheck()
// rebuilds each program from the embedded inputs with the same deterministic
// builders and re-verifies the stored primal/dual (or Farkas) vectors, so a
// report can be audited from the file alone without running the solver.

#include "bellkit/analyses.hpp"
#include "bellkit/io.hpp"

#include <functional>
#include <string>
#include <vector>

namespace bellkit {

inline constexpr int report_format_version = 1;

namespace detail {

inline Json report_header(const std::string& kind) {
    return {{"report", kind}, {"format_version", report_format_version}};
}

inline Json extension_to_json(const ExtensionResult& r) {
    Json j = {{"status", to_string(r.status)}, {"certificate", solution_to_json(r.certificate)}};
    if (r.feasible()) {
        j["value"] = r.value.get_str();
        j["extension"] = behavior_to_json(*r.extension);
    }
    return j;
}

inline Json strategies_to_json(const std::vector<std::vector<std::size_t>>& st) {
    Json a = Json::array();
    for (const auto& party : st) {
        Json t = Json::array();
        for (auto x : party) t.push_back(x + 1); // 1-based output labels
        a.push_back(t);
    }
    return a;
}

} // namespace detail

inline Json validate_report(const Behavior& b) {
    Json j = detail::report_header("validate");
    j["behavior"] = behavior_to_json(b);
    const auto v = validate(b);
    Json viol = Json::array();
    for (const auto& x : v.violations)
        viol.push_back({{"kind", x.kind == Violation::Kind::Positivity ? "positivity" : "normalization"},
                        {"index", x.index},
                        {"message", x.message}});
    j["violations"] = viol;
    const auto ns = v.ok() ? check_nonsignaling(b) : NonsignalingReport{};
    j["nonsignaling_checked"] = v.ok();
    j["signaling_rows"] = ns.violated;
    j["ok"] = v.ok() && ns.ok();
    return j;
}

inline Json locality_report(const Behavior& b, const LocalityReport& r, const VertexMatrix& vertices) {
    Json j = detail::report_header("localpart");
    j["behavior"] = behavior_to_json(b);
    j["weight"] = r.weight.get_str();
    j["local"] = r.local();
    Json dec = Json::array();
    for (const auto& [k, w] : r.decomposition)
        dec.push_back({{"vertex", k}, {"strategies", detail::strategies_to_json(vertices.strategies(k))}, {"weight", w.get_str()}});
    j["decomposition"] = dec;
    j["separating"] = r.separating ? functional_to_json(*r.separating) : Json(nullptr);
    if (r.separating) j["separating_value"] = evaluate_unchecked(*r.separating, b).get_str();
    j["certificate"] = solution_to_json(r.certificate);
    return j;
}

inline Json belleval_report(const BellFunctional& f, const Behavior& b, const Rational& value) {
    Json j = detail::report_header("belleval");
    j["functional"] = functional_to_json(f);
    j["behavior"] = behavior_to_json(b);
    j["value"] = value.get_str();
    j["bound"] = f.bound().get_str();
    j["violates"] = value > f.bound();
    return j;
}

inline Json bellmax_ns_report(const BellFunctional& f, const BellOptimum& opt) {
    Json j = detail::report_header("bellmax");
    j["set"] = "ns";
    j["functional"] = functional_to_json(f);
    j["value"] = opt.value.get_str();
    j["maximizer"] = behavior_to_json(opt.optimizer);
    j["certificate"] = solution_to_json(opt.certificate);
    j["exceeds_bound"] = opt.value > f.bound();
    return j;
}

inline Json bellmax_local_report(const BellFunctional& f, const LocalOptimum& opt, const VertexMatrix& vertices) {
    Json j = detail::report_header("bellmax");
    j["set"] = "local";
    j["functional"] = functional_to_json(f);
    j["value"] = opt.value.get_str();
    j["vertex"] = opt.vertex;
    j["strategies"] = detail::strategies_to_json(vertices.strategies(opt.vertex));
    j["exceeds_bound"] = opt.value > f.bound();
    return j;
}

inline Json monogamy_report(const BellFunctional& f, const BellOptimum& opt) {
    Json j = detail::report_header("monogamy");
    j["functional"] = functional_to_json(f);
    j["value"] = opt.value.get_str();
    j["witness"] = behavior_to_json(opt.optimizer);
    j["certificate"] = solution_to_json(opt.certificate);
    j["simultaneous_violation"] = opt.value > 2 * f.bound();
    return j;
}

inline Json transitivity_report(const BellFunctional& f_ab, const BellFunctional& f_bc, const BellFunctional& f_ac,
                                const TransitivityReport& r) {
    Json j = detail::report_header("transitivity");
    j["functionals"] = {{"ab", functional_to_json(f_ab)}, {"bc", functional_to_json(f_bc)}, {"ac", functional_to_json(f_ac)}};
    j["stage1"] = {{"value", r.stage1_value.get_str()}, {"certificate", solution_to_json(r.stage1)}};
    j["stage2"] = {{"value", r.stage2_value.get_str()}, {"certificate", solution_to_json(r.stage2)}};
    j["witness"] = behavior_to_json(r.witness);
    j["marginal_ab"] = behavior_to_json(r.marginal_ab);
    j["marginal_bc"] = behavior_to_json(r.marginal_bc);
    j["ab_value"] = r.ab_value.get_str();
    j["bc_value"] = r.bc_value.get_str();
    j["ac_witness_value"] = r.ac_witness_value.get_str();
    j["ac_min"] = detail::extension_to_json(r.ac_min);
    j["ac_local"] = detail::extension_to_json(r.ac_local);
    j["transitive"] = r.transitive();
    j["ac_nonlocal_certified"] = r.ac_nonlocal_certified();
    return j;
}

inline Json extendmin_report(const Behavior& ab, const Behavior& bc, const BellFunctional& f_ac, const ExtensionResult& r) {
    Json j = detail::report_header("extendmin");
    j["marginal_ab"] = behavior_to_json(ab);
    j["marginal_bc"] = behavior_to_json(bc);
    j["functional"] = functional_to_json(f_ac);
    j["result"] = detail::extension_to_json(r);
    j["violation_forced"] = r.feasible() && r.value > f_ac.bound();
    return j;
}

inline Json extend_localpart_report(const Behavior& ab, const Behavior& bc, const ExtensionResult& r) {
    Json j = detail::report_header("extend_localpart");
    j["marginal_ab"] = behavior_to_json(ab);
    j["marginal_bc"] = behavior_to_json(bc);
    j["result"] = detail::extension_to_json(r);
    j["ac_nonlocal_certified"] = r.feasible() && r.value < 1;
    return j;
}

inline Json vertices_report(const VertexMatrix& v, bool with_columns) {
    Json j = detail::report_header("vertices");
    j["scenario"] = scenario_to_json(v.scenario());
    j["count"] = v.size();
    if (with_columns) {
        Json cols = Json::array();
        for (std::size_t k = 0; k < v.size(); ++k)
            cols.push_back({{"vertex", k}, {"strategies", detail::strategies_to_json(v.strategies(k))}, {"support", v.support(k)}});
        j["columns"] = cols;
    }
    return j;
}

// ---------------------------------------------------------------- recheck

struct RecheckResult {
    std::vector<std::string> passed;
    std::vector<std::string> failed;
    bool ok() const { return failed.empty() && !passed.empty(); }
};

namespace detail {

class Checker {
public:
    explicit Checker(RecheckResult& out) : out_(out) {}

    void expect(bool cond, const std::string& what) { (cond ? out_.passed : out_.failed).push_back(what); }

    /// Stored certificate must verify against the rebuilt program, and its
    /// value must match `claimed` when given.
    void lp(const std::string& what, const LinearProgram& program, const Json& cert, const Json* claimed = nullptr) {
        const LpSolution s = solution_from_json(cert, what);
        if (s.status == LpStatus::Optimal) {
            expect(verify_certificate(program, s), what + ": optimality certificate verifies");
            if (claimed) expect(rational_from_json(*claimed, what) == s.value, what + ": reported value matches certificate");
        } else if (s.status == LpStatus::Infeasible) {
            expect(verify_infeasibility(program, s.farkas), what + ": infeasibility certificate verifies");
        } else {
            expect(false, what + ": unbounded status carries no certificate");
        }
    }

private:
    RecheckResult& out_;
};

inline const Json& at(const Json& j, const std::string& key) { return field(j, key, "report"); }
inline Rational rat(const Json& j, const std::string& key) { return rational_from_json(at(j, key), key); }

inline void expect_valid_ns(Checker& c, const Behavior& b, const std::string& what) {
    c.expect(validate(b).ok() && check_nonsignaling(b).ok(), what + " is a valid nonsignaling behavior");
}

inline void expect_marginal_pair(Checker& c, const Behavior& ab, const Behavior& bc) {
    bool ok = true;
    try {
        check_marginal_pair(ab, bc);
    } catch (const std::exception&) {
        ok = false;
    }
    c.expect(ok, "marginals are valid and agree on B");
}

inline void recheck_extension(Checker& c, const std::string& what, const Json& ext, const LinearProgram& lp,
                              std::size_t dim) {
    const Json& cert = at(ext, "certificate");
    c.lp(what, lp, cert, ext.contains("value") ? &ext.at("value") : nullptr);
    if (ext.contains("extension")) {
        const LpSolution s = solution_from_json(cert, what);
        const Behavior e = behavior_from_json(ext.at("extension"), what + ".extension");
        c.expect(e.p() == slice(s.primal, 0, dim), what + ": extension equals certificate primal");
    }
}

} // namespace detail

/// Re-verifies a report produced by any of the *_report functions.
inline RecheckResult recheck(const Json& report, std::size_t cap = default_vertex_cap) {
    using namespace detail;
    RecheckResult out;
    Checker c(out);
    const std::string kind = at(report, "report").get<std::string>();

    if (kind == "validate") {
        const Behavior b = behavior_from_json(at(report, "behavior"));
        const Json fresh = validate_report(b);
        c.expect(fresh.at("ok") == at(report, "ok"), "validation verdict reproduces");
        c.expect(fresh.at("violations") == at(report, "violations"), "violation list reproduces");
    } else if (kind == "localpart") {
        const Behavior b = behavior_from_json(at(report, "behavior"));
        expect_valid_ns(c, b, "behavior");
        const VertexMatrix v(b.scenario(), cap);
        const LinearProgram lp = locality_lp(b, v);
        c.lp("locality LP", lp, at(report, "certificate"), &at(report, "weight"));
        const LpSolution s = solution_from_json(at(report, "certificate"));
        Rational total = 0;
        RationalVector q(v.size());
        for (const auto& d : at(report, "decomposition")) {
            const std::size_t k = d.at("vertex").get<std::size_t>();
            c.expect(k < v.size(), "decomposition vertex index in range");
            if (k >= v.size()) continue;
            q[k] = rational_from_json(d.at("weight"), "decomposition weight");
            total += q[k];
        }
        c.expect(total == rat(report, "weight"), "decomposition weights sum to the weight");
        c.expect(q == s.primal, "decomposition equals certificate primal");
        c.expect((rat(report, "weight") == 1) == at(report, "local").get<bool>(), "local flag matches weight");
        const Json& sep = at(report, "separating");
        if (!sep.is_null()) {
            const BellFunctional f = functional_from_json(sep, "separating");
            c.expect(max_bell_local(f, cap) == f.bound(), "separating functional bound is its local maximum");
            c.expect(evaluate_unchecked(f, b) > f.bound(), "separating functional is violated by the behavior");
        } else {
            c.expect(rat(report, "weight") == 1, "no separating functional only for local behaviors");
        }
    } else if (kind == "belleval") {
        const BellFunctional f = functional_from_json(at(report, "functional"));
        const Behavior b = behavior_from_json(at(report, "behavior"));
        c.expect(evaluate(f, b) == rat(report, "value"), "Bell value reproduces");
    } else if (kind == "bellmax") {
        const BellFunctional f = functional_from_json(at(report, "functional"));
        if (at(report, "set") == "ns") {
            c.lp("nonsignaling Bell LP", ns_bell_lp(f), at(report, "certificate"), &at(report, "value"));
            const Behavior m = behavior_from_json(at(report, "maximizer"));
            const LpSolution s = solution_from_json(at(report, "certificate"));
            c.expect(m.p() == slice(s.primal, 0, m.scenario().dimension()), "maximizer equals certificate primal");
            c.expect(evaluate(f, m) == rat(report, "value"), "maximizer attains the value");
        } else {
            c.expect(max_bell_local(f, cap) == rat(report, "value"), "local maximum reproduces by enumeration");
            const VertexMatrix v(f.scenario(), cap);
            const std::size_t k = at(report, "vertex").get<std::size_t>();
            c.expect(k < v.size() && evaluate_unchecked(f, v.column(k)) == rat(report, "value"), "reported vertex attains the value");
        }
    } else if (kind == "monogamy") {
        const BellFunctional f = functional_from_json(at(report, "functional"));
        c.lp("monogamy LP", pair_sum_lp(f, f, false, cap), at(report, "certificate"), &at(report, "value"));
        const Behavior w = behavior_from_json(at(report, "witness"), "witness");
        const LpSolution s = solution_from_json(at(report, "certificate"));
        c.expect(w.p() == slice(s.primal, 0, w.scenario().dimension()), "witness equals certificate primal");
    } else if (kind == "transitivity") {
        const Json& fs = at(report, "functionals");
        const BellFunctional f_ab = functional_from_json(fs.at("ab"), "functionals.ab");
        const BellFunctional f_bc = functional_from_json(fs.at("bc"), "functionals.bc");
        const BellFunctional f_ac = functional_from_json(fs.at("ac"), "functionals.ac");
        c.lp("stage 1", pair_sum_lp(f_ab, f_bc, false, cap), at(report, "stage1").at("certificate"), &at(report, "stage1").at("value"));
        c.lp("stage 2", pair_sum_lp(f_ab, f_bc, true, cap), at(report, "stage2").at("certificate"), &at(report, "stage2").at("value"));
        const Behavior w = behavior_from_json(at(report, "witness"), "witness");
        const LpSolution s1 = solution_from_json(at(report, "stage1").at("certificate"));
        c.expect(s1.status == LpStatus::Optimal && w.p() == s1.primal, "witness equals stage-1 primal");
        const Behavior ab = behavior_from_json(at(report, "marginal_ab"), "marginal_ab");
        const Behavior bc = behavior_from_json(at(report, "marginal_bc"), "marginal_bc");
        expect_valid_ns(c, w, "witness");
        c.expect(marginalize(w, pair_ab) == ab, "AB marginal reproduces");
        c.expect(marginalize(w, pair_bc) == bc, "BC marginal reproduces");
        c.expect(evaluate(f_ab, ab) == rat(report, "ab_value"), "AB Bell value reproduces");
        c.expect(evaluate(f_bc, bc) == rat(report, "bc_value"), "BC Bell value reproduces");
        c.expect(rat(report, "ab_value") + rat(report, "bc_value") == rat(at(report, "stage1"), "value"),
                 "AB and BC values sum to stage 1");
        c.expect(evaluate(f_ac, marginalize(w, pair_ac)) == rat(report, "ac_witness_value"), "witness AC value reproduces");
        const std::size_t dim = w.scenario().dimension();
        recheck_extension(c, "AC minimum", at(report, "ac_min"), extension_bell_lp(ab, bc, f_ac), dim);
        recheck_extension(c, "AC local part", at(report, "ac_local"), extension_ac_local_lp(ab, bc, cap), dim);
        c.expect((rat(at(report, "stage1"), "value") > rat(at(report, "stage2"), "value")) == at(report, "transitive").get<bool>(),
                 "transitive flag matches stage values");
    } else if (kind == "extendmin") {
        const Behavior ab = behavior_from_json(at(report, "marginal_ab"), "marginal_ab");
        const Behavior bc = behavior_from_json(at(report, "marginal_bc"), "marginal_bc");
        const BellFunctional f = functional_from_json(at(report, "functional"));
        expect_marginal_pair(c, ab, bc);
        recheck_extension(c, "extension minimum", at(report, "result"), extension_bell_lp(ab, bc, f),
                          chain_scenario(ab.scenario(), bc.scenario()).dimension());
    } else if (kind == "extend_localpart") {
        const Behavior ab = behavior_from_json(at(report, "marginal_ab"), "marginal_ab");
        const Behavior bc = behavior_from_json(at(report, "marginal_bc"), "marginal_bc");
        expect_marginal_pair(c, ab, bc);
        recheck_extension(c, "extension AC local part", at(report, "result"), extension_ac_local_lp(ab, bc, cap),
                          chain_scenario(ab.scenario(), bc.scenario()).dimension());
    } else if (kind == "vertices") {
        const Scenario s = scenario_from_json(at(report, "scenario"), "scenario");
        c.expect(vertex_count(s) == mpz_class(std::to_string(at(report, "count").get<std::size_t>())), "vertex count reproduces");
        if (report.contains("columns")) {
            const VertexMatrix v(s, cap);
            bool same = report.at("columns").size() == v.size();
            for (std::size_t k = 0; same && k < v.size(); ++k)
                same = report.at("columns")[k].at("support").get<std::vector<std::size_t>>() == v.support(k);
            c.expect(same, "vertex columns reproduce");
        }
    } else {
        throw ParseError("report: unknown report kind \"" + kind + "\"");
    }
    return out;
}

} // namespace bellkit
