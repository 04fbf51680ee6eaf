#pragma once

// Locality and transitivity analyses. Every analysis is a linear program built
// by one of the *_lp functions below; the builders are deterministic, so a
// stored solution can be re-verified later by rebuilding the same program.

#include "bellkit/behavior.hpp"
#include "bellkit/bell.hpp"
#include "bellkit/constraints.hpp"
#include "bellkit/lp.hpp"
#include "bellkit/vertices.hpp"

#include <cstddef>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace bellkit {

/// Inputs that are well-formed but mutually inconsistent, e.g. bipartite
/// marginals that disagree on the shared party.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

inline const PartySubset pair_ab{{0, 1}};
inline const PartySubset pair_bc{{1, 2}};
inline const PartySubset pair_ac{{0, 2}};

namespace detail {

inline void require_valid(const Behavior& b, const std::string& what) {
    const auto report = validate(b);
    if (!report.ok()) throw InputError(what + " is not a valid behavior: " + report.violations.front().message);
    require_nonsignaling(b, what);
}

/// Objective vector and rows shared by every program over tripartite p.
inline void add_ns_behavior(LinearProgram& lp, const Scenario& s) {
    lp.add_variables(s.dimension(), "p");
    lp.add_system(ns_constraint_system(s));
    lp.add_system(normalization_constraints(s));
}

inline void set_costs(LinearProgram& lp, const RationalVector& c, std::size_t offset = 0) {
    for (std::size_t j = 0; j < c.size(); ++j)
        if (sgn(c[j]) != 0) lp.set_cost(offset + j, c[j]);
}

/// For every entry of the vertex scenario, the vertices with a 1 there.
inline std::vector<std::vector<std::size_t>> vertex_rows(const VertexMatrix& v) {
    std::vector<std::vector<std::size_t>> rows(v.scenario().dimension());
    for (std::size_t k = 0; k < v.size(); ++k)
        for (auto i : v.support(k)) rows[i].push_back(k);
    return rows;
}

/// Rows  M_pair p == target  over the p block starting at column 0.
inline void add_marginal_equalities(LinearProgram& lp, const Scenario& s, const PartySubset& pair, const Behavior& target,
                                    const std::string& tag) {
    const MarginalOperator m = marginal_operator(s, pair);
    for (std::size_t r = 0; r < m.rows().size(); ++r) {
        std::vector<SparseTerm> terms;
        for (auto c : m.rows()[r]) terms.push_back({c, 1});
        lp.add_row(std::move(terms), RowType::Equal, target[r], "marg" + tag + "[" + std::to_string(r) + "]");
    }
}

/// Adds q >= 0 over the vertices of the AC scenario, returns the first q column,
/// and adds rows  A_AC q (op) M_AC p  (op is == or <=).
inline std::size_t add_ac_local_block(LinearProgram& lp, const Scenario& s, RowType op, std::size_t cap) {
    const MarginalOperator m = marginal_operator(s, pair_ac);
    const VertexMatrix vertices(m.to(), cap);
    const std::size_t q0 = lp.add_variables(vertices.size(), "q");
    const auto rows = vertex_rows(vertices);
    for (std::size_t r = 0; r < rows.size(); ++r) {
        std::vector<SparseTerm> terms;
        for (auto k : rows[r]) terms.push_back({q0 + k, 1});
        for (auto c : m.rows()[r]) terms.push_back({c, -1});
        lp.add_row(std::move(terms), op, 0, "acloc[" + std::to_string(r) + "]");
    }
    return q0;
}

inline RationalVector slice(const RationalVector& v, std::size_t from, std::size_t count) {
    return RationalVector(v.begin() + static_cast<std::ptrdiff_t>(from),
                          v.begin() + static_cast<std::ptrdiff_t>(from + count));
}

} // namespace detail

/// Tripartite scenario A-B-C whose AB and BC restrictions are `ab` and `bc`.
inline Scenario chain_scenario(const Scenario& ab, const Scenario& bc) {
    if (ab.parties() != 2 || bc.parties() != 2) throw StructuralError("chain scenario needs two bipartite scenarios");
    if (ab.inputs()[1] != bc.inputs()[0] || ab.outputs()[1] != bc.outputs()[0])
        throw StructuralError("AB and BC scenarios disagree on party B");
    return Scenario({ab.inputs()[0], ab.inputs()[1], bc.inputs()[1]}, {ab.outputs()[0], ab.outputs()[1], bc.outputs()[1]});
}

// ---------------------------------------------------------------- locality

/// max sum(q)  s.t.  A q <= p, q >= 0, columns of A the deterministic vertices.
inline LinearProgram locality_lp(const Behavior& b, const VertexMatrix& vertices) {
    LinearProgram lp(Sense::Maximize);
    const std::size_t q0 = lp.add_variables(vertices.size(), "q");
    for (std::size_t k = 0; k < vertices.size(); ++k) lp.set_cost(q0 + k, 1);
    const auto rows = detail::vertex_rows(vertices);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        std::vector<SparseTerm> terms;
        for (auto k : rows[i]) terms.push_back({q0 + k, 1});
        lp.add_row(std::move(terms), RowType::LessEqual, b[i], "dominate[" + std::to_string(i) + "]");
    }
    return lp;
}

struct LocalityReport {
    Rational weight;
    std::map<std::size_t, Rational> decomposition; // vertex index -> weight, nonzero only
    std::optional<BellFunctional> separating;      // present iff weight < 1
    LpSolution certificate;
    bool local() const { return weight == 1; }
};

/// Separating functional read off the locality dual: -y scores every vertex
/// at most -1 while b scores -weight.
inline BellFunctional separating_functional(const Scenario& s, const VertexMatrix& vertices, const RationalVector& y) {
    RationalVector coeffs(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) coeffs[i] = -y[i];
    std::optional<Rational> best;
    for (std::size_t k = 0; k < vertices.size(); ++k) {
        Rational v = 0;
        for (auto i : vertices.support(k)) v += coeffs[i];
        if (!best || v > *best) best = v;
    }
    return BellFunctional(s, std::move(coeffs), *best, "separating");
}

/// Largest weight of a local sub-distribution dominated entrywise by b; 1 iff b is local.
inline LocalityReport local_part(const Behavior& b, std::size_t cap = default_vertex_cap) {
    detail::require_valid(b, "local_part input");
    const VertexMatrix vertices(b.scenario(), cap);
    const LinearProgram lp = locality_lp(b, vertices);
    LocalityReport report;
    report.certificate = solve(lp);
    if (report.certificate.status != LpStatus::Optimal) throw std::logic_error("locality LP is always feasible and bounded");
    report.weight = report.certificate.value;
    for (std::size_t k = 0; k < vertices.size(); ++k)
        if (sgn(report.certificate.primal[k]) != 0) report.decomposition[k] = report.certificate.primal[k];
    if (report.weight < 1) report.separating = separating_functional(b.scenario(), vertices, report.certificate.dual);
    return report;
}

// ---------------------------------------------------------------- Bell maxima

/// Optimize f over the nonsignaling polytope of its scenario.
inline LinearProgram ns_bell_lp(const BellFunctional& f, Sense sense = Sense::Maximize) {
    LinearProgram lp(sense);
    detail::add_ns_behavior(lp, f.scenario());
    detail::set_costs(lp, f.coeffs());
    return lp;
}

struct BellOptimum {
    Rational value;
    Behavior optimizer;
    LpSolution certificate;
};

inline BellOptimum optimize_bell_ns(const BellFunctional& f, Sense sense) {
    const LinearProgram lp = ns_bell_lp(f, sense);
    LpSolution sol = solve(lp);
    if (sol.status != LpStatus::Optimal) throw std::logic_error("nonsignaling Bell LP is always feasible and bounded");
    Behavior opt(f.scenario(), sol.primal);
    return {sol.value, std::move(opt), std::move(sol)};
}

inline BellOptimum max_bell_ns(const BellFunctional& f) { return optimize_bell_ns(f, Sense::Maximize); }
inline BellOptimum min_bell_ns(const BellFunctional& f) { return optimize_bell_ns(f, Sense::Minimize); }

struct LocalOptimum {
    Rational value;
    std::size_t vertex;
};

/// Exhaustive maximum of f over the deterministic vertices (ties -> lowest index).
inline LocalOptimum max_bell_local_vertex(const BellFunctional& f, std::size_t cap = default_vertex_cap) {
    const VertexMatrix vertices(f.scenario(), cap);
    LocalOptimum best{0, 0};
    for (std::size_t k = 0; k < vertices.size(); ++k) {
        Rational v = 0;
        for (auto i : vertices.support(k)) v += f.coeffs()[i];
        if (k == 0 || v > best.value) best = {v, k};
    }
    return best;
}

inline Rational max_bell_local(const BellFunctional& f, std::size_t cap = default_vertex_cap) {
    return max_bell_local_vertex(f, cap).value;
}

// ---------------------------------------------------------------- tripartite

/// max f_AB(p_AB) + f_BC(p_BC) over tripartite nonsignaling p; with
/// `ac_local` the AC marginal is additionally constrained to the local polytope
/// via M_AC p = A_AC q, sum(q) = 1, q >= 0.
inline LinearProgram pair_sum_lp(const BellFunctional& f_ab, const BellFunctional& f_bc, bool ac_local,
                                 std::size_t cap = default_vertex_cap) {
    const Scenario s = chain_scenario(f_ab.scenario(), f_bc.scenario());
    LinearProgram lp(Sense::Maximize);
    detail::add_ns_behavior(lp, s);
    detail::set_costs(lp, (lift_to_pair(f_ab, s, pair_ab) + lift_to_pair(f_bc, s, pair_bc)).coeffs());
    if (ac_local) {
        const std::size_t q0 = detail::add_ac_local_block(lp, s, RowType::Equal, cap);
        std::vector<SparseTerm> total;
        for (std::size_t j = q0; j < lp.num_variables(); ++j) total.push_back({j, 1});
        lp.add_row(std::move(total), RowType::Equal, 1, "acloc total");
    }
    return lp;
}

/// f(AB) + f(BC) maximized over tripartite nonsignaling behaviors, with the
/// maximizer and its certificate.
inline BellOptimum monogamy_analysis(const BellFunctional& f, const Scenario& s3) {
    if (s3.parties() != 3) throw StructuralError("monogamy_max needs a tripartite scenario");
    if (!(s3.restrict_to(pair_ab) == f.scenario()) || !(s3.restrict_to(pair_bc) == f.scenario()))
        throw StructuralError("monogamy_max: pairs {1,2} and {2,3} must match the functional's scenario");
    LpSolution sol = solve(pair_sum_lp(f, f, false));
    if (sol.status != LpStatus::Optimal) throw std::logic_error("pair-sum program is always feasible and bounded");
    Behavior witness(s3, sol.primal);
    return {sol.value, std::move(witness), std::move(sol)};
}

inline Rational monogamy_max(const BellFunctional& f, const Scenario& s3) { return monogamy_analysis(f, s3).value; }

/// Checks the preconditions shared by the marginal-extension programs and
/// returns the tripartite scenario.
inline Scenario check_marginal_pair(const Behavior& ab, const Behavior& bc) {
    detail::require_valid(ab, "AB marginal");
    detail::require_valid(bc, "BC marginal");
    const Scenario s = chain_scenario(ab.scenario(), bc.scenario());
    if (!(marginalize(ab, PartySubset({1})) == marginalize(bc, PartySubset({0}))))
        throw InputError("AB and BC marginals disagree on party B's marginal behavior");
    return s;
}

/// min f_AC(p_AC) over tripartite nonsignaling p with p_AB = ab, p_BC = bc.
inline LinearProgram extension_bell_lp(const Behavior& ab, const Behavior& bc, const BellFunctional& f_ac) {
    const Scenario s = chain_scenario(ab.scenario(), bc.scenario());
    LinearProgram lp(Sense::Minimize);
    detail::add_ns_behavior(lp, s);
    detail::set_costs(lp, lift_to_pair(f_ac, s, pair_ac).coeffs());
    detail::add_marginal_equalities(lp, s, pair_ab, ab, "AB");
    detail::add_marginal_equalities(lp, s, pair_bc, bc, "BC");
    return lp;
}

/// max sum(q) over (p, q): p a nonsignaling extension of (ab, bc) and
/// A_AC q <= M_AC p, q >= 0.
inline LinearProgram extension_ac_local_lp(const Behavior& ab, const Behavior& bc, std::size_t cap = default_vertex_cap) {
    const Scenario s = chain_scenario(ab.scenario(), bc.scenario());
    LinearProgram lp(Sense::Maximize);
    detail::add_ns_behavior(lp, s);
    detail::add_marginal_equalities(lp, s, pair_ab, ab, "AB");
    detail::add_marginal_equalities(lp, s, pair_bc, bc, "BC");
    const std::size_t q0 = detail::add_ac_local_block(lp, s, RowType::LessEqual, cap);
    for (std::size_t j = q0; j < lp.num_variables(); ++j) lp.set_cost(j, 1);
    return lp;
}

struct ExtensionResult {
    LpStatus status = LpStatus::Infeasible; // infeasible: no nonsignaling extension exists
    Rational value;
    std::optional<Behavior> extension;
    LpSolution certificate;
    bool feasible() const { return status == LpStatus::Optimal; }
};

namespace detail {

inline ExtensionResult extension_result(const Scenario& s, LpSolution sol) {
    ExtensionResult r;
    r.status = sol.status;
    if (sol.status == LpStatus::Optimal) {
        r.value = sol.value;
        r.extension = Behavior(s, slice(sol.primal, 0, s.dimension()));
    }
    r.certificate = std::move(sol);
    return r;
}

} // namespace detail

/// Smallest Bell value of f_AC over all nonsignaling tripartite extensions of
/// the given AB and BC marginals.
inline ExtensionResult min_bell_extension(const Behavior& ab, const Behavior& bc, const BellFunctional& f_ac) {
    const Scenario s = check_marginal_pair(ab, bc);
    if (!(s.restrict_to(pair_ac) == f_ac.scenario()))
        throw StructuralError("AC functional \"" + f_ac.name() + "\" does not match the A-C scenario");
    return detail::extension_result(s, solve(extension_bell_lp(ab, bc, f_ac)));
}

/// Largest local weight of the AC marginal over all nonsignaling extensions;
/// a value below 1 certifies that every extension has a nonlocal AC marginal.
inline ExtensionResult max_ac_local_part(const Behavior& ab, const Behavior& bc, std::size_t cap = default_vertex_cap) {
    const Scenario s = check_marginal_pair(ab, bc);
    return detail::extension_result(s, solve(extension_ac_local_lp(ab, bc, cap)));
}

struct TransitivityReport {
    Rational stage1_value;
    Rational stage2_value;
    Behavior witness;
    Behavior marginal_ab;
    Behavior marginal_bc;
    Rational ab_value;          // f_AB on marginal_ab
    Rational bc_value;          // f_BC on marginal_bc
    Rational ac_witness_value;  // f_AC on the witness's own AC marginal
    ExtensionResult ac_min;     // min f_AC over extensions of the marginals
    ExtensionResult ac_local;   // max AC local weight over extensions
    LpSolution stage1;
    LpSolution stage2;

    bool transitive() const { return stage1_value > stage2_value; }
    bool ac_nonlocal_certified() const { return ac_local.feasible() && ac_local.value < 1; }
};

/// Two-stage search: maximize f_AB + f_BC over tripartite nonsignaling
/// behaviors, then again with a local AC marginal. The stage-1 maximizer is the
/// witness; its AB and BC marginals are then tested for forced AC nonlocality.
inline TransitivityReport transitivity_search(const BellFunctional& f_ab, const BellFunctional& f_bc,
                                              const BellFunctional& f_ac, std::size_t cap = default_vertex_cap) {
    const Scenario s = chain_scenario(f_ab.scenario(), f_bc.scenario());
    if (!(s.restrict_to(pair_ac) == f_ac.scenario()))
        throw StructuralError("AC functional \"" + f_ac.name() + "\" does not match the A-C scenario");

    LpSolution stage1 = solve(pair_sum_lp(f_ab, f_bc, false, cap));
    LpSolution stage2 = solve(pair_sum_lp(f_ab, f_bc, true, cap));
    if (stage1.status != LpStatus::Optimal || stage2.status != LpStatus::Optimal)
        throw std::logic_error("pair-sum programs are always feasible and bounded");

    Behavior witness(s, stage1.primal);
    Behavior ab = marginalize(witness, pair_ab);
    Behavior bc = marginalize(witness, pair_bc);
    const Rational ab_value = evaluate(f_ab, ab);
    const Rational bc_value = evaluate(f_bc, bc);
    const Rational ac_value = evaluate(f_ac, marginalize(witness, pair_ac));
    ExtensionResult ac_min = min_bell_extension(ab, bc, f_ac);
    ExtensionResult ac_local = max_ac_local_part(ab, bc, cap);
    return TransitivityReport{stage1.value,       stage2.value,      std::move(witness), std::move(ab),
                              std::move(bc),      ab_value,          bc_value,           ac_value,
                              std::move(ac_min),  std::move(ac_local), std::move(stage1), std::move(stage2)};
}

} // namespace bellkit
