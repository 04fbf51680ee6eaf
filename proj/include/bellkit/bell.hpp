#pragma once

// Bell functionals: CG coefficient tables, their expansion to full behavior
// space, evaluation, lifting onto party pairs, and the built-in catalog.

#include "bellkit/behavior.hpp"
#include "bellkit/constraints.hpp"
#include "bellkit/rational.hpp"
#include "bellkit/scenario.hpp"

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace bellkit {

/// Bipartite binary-outcome inequality in Collins-Gisin form:
///
///     sum_u row[u] P_X|U(1|u) + sum_v col[v] P_Y|V(1|v)
///       + sum_{u,v} body[u][v] P_XY|UV(1,1|u,v)  <=  bound
///
/// Row index is Alice's input, column index Bob's, as in printed tables.
struct CgTable {
    std::size_t m = 0;
    RationalVector row;
    RationalVector col;
    std::vector<RationalVector> body;
    Rational bound;
    std::string name;

    void check() const {
        if (m < 1) throw StructuralError("CG table needs at least one input");
        if (row.size() != m || col.size() != m || body.size() != m)
            throw StructuralError("CG table \"" + name + "\": marginal or body dimension differs from m");
        for (const auto& r : body)
            if (r.size() != m) throw StructuralError("CG table \"" + name + "\": body row length differs from m");
    }

    friend bool operator==(const CgTable&, const CgTable&) = default;
};

class BellFunctional {
public:
    BellFunctional(Scenario scenario, RationalVector coeffs, Rational bound, std::string name)
        : scenario_(std::move(scenario)), coeffs_(std::move(coeffs)), bound_(std::move(bound)), name_(std::move(name)) {
        if (coeffs_.size() != scenario_.dimension())
            throw StructuralError("Bell functional \"" + name_ + "\" has " + std::to_string(coeffs_.size()) +
                                  " coefficients, scenario needs " + std::to_string(scenario_.dimension()));
    }

    static BellFunctional zero(const Scenario& s, std::string name = "zero") {
        return BellFunctional(s, RationalVector(s.dimension()), 0, std::move(name));
    }

    const Scenario& scenario() const { return scenario_; }
    const RationalVector& coeffs() const { return coeffs_; }
    const Rational& bound() const { return bound_; }
    const std::string& name() const { return name_; }

    BellFunctional with_bound(Rational bound) const { return BellFunctional(scenario_, coeffs_, std::move(bound), name_); }

    /// Coefficient-wise sum; the bound of the sum is the sum of bounds.
    friend BellFunctional operator+(const BellFunctional& a, const BellFunctional& b) {
        if (!(a.scenario_ == b.scenario_)) throw StructuralError("adding Bell functionals on different scenarios");
        RationalVector c(a.coeffs_.size());
        for (std::size_t i = 0; i < c.size(); ++i) c[i] = a.coeffs_[i] + b.coeffs_[i];
        return BellFunctional(a.scenario_, std::move(c), a.bound_ + b.bound_, a.name_ + "+" + b.name_);
    }

private:
    Scenario scenario_;
    RationalVector coeffs_;
    Rational bound_;
    std::string name_;
};

/// Expands a CG table onto the (m inputs, 2 outputs) bipartite scenario.
/// Single-party marginals are read off against the other party's first input,
/// which is unambiguous on nonsignaling behaviors.
inline BellFunctional cg_to_functional(const CgTable& t) {
    t.check();
    const Scenario s = Scenario::uniform(2, t.m, 2);
    RationalVector b(s.dimension());
    for (std::size_t u = 0; u < t.m; ++u)
        for (std::size_t y = 0; y < 2; ++y) b[s.index({u, 0}, {0, y})] += t.row[u];
    for (std::size_t v = 0; v < t.m; ++v)
        for (std::size_t x = 0; x < 2; ++x) b[s.index({0, v}, {x, 0})] += t.col[v];
    for (std::size_t u = 0; u < t.m; ++u)
        for (std::size_t v = 0; v < t.m; ++v) b[s.index({u, v}, {0, 0})] += t.body[u][v];
    return BellFunctional(s, std::move(b), t.bound, t.name);
}

/// Inner product without the nonsignaling check; for callers that already
/// know the behavior is nonsignaling (e.g. LP outputs re-verified elsewhere).
inline Rational evaluate_unchecked(const BellFunctional& f, const Behavior& b) {
    if (!(f.scenario() == b.scenario()))
        throw StructuralError("Bell functional \"" + f.name() + "\" is on " + f.scenario().describe() +
                              ", behavior on " + b.scenario().describe());
    return dot(f.coeffs(), b.p());
}

/// Bell value f(b). Signaling behaviors are refused because the value would
/// depend on the marginal-expansion convention.
inline Rational evaluate(const BellFunctional& f, const Behavior& b) {
    if (!(f.scenario() == b.scenario()))
        throw StructuralError("Bell functional \"" + f.name() + "\" is on " + f.scenario().describe() +
                              ", behavior on " + b.scenario().describe());
    require_nonsignaling(b, "evaluate");
    return dot(f.coeffs(), b.p());
}

/// f composed with the marginal map onto `subset` of `target`, so that
/// evaluate(lift, b) == evaluate(f, marginalize(b, subset)) for nonsignaling b.
inline BellFunctional lift_to_subset(const BellFunctional& f, const Scenario& target, const PartySubset& subset) {
    subset.check_within(target.parties());
    if (!(target.restrict_to(subset) == f.scenario()))
        throw StructuralError("cannot lift \"" + f.name() + "\" onto parties " + subset.describe() + ": sub-scenario (" +
                              target.restrict_to(subset).describe() + ") differs from " + f.scenario().describe());
    const MarginalOperator m = marginal_operator(target, subset);
    return BellFunctional(target, m.pull_back(f.coeffs()), f.bound(), f.name() + "@" + subset.describe());
}

inline BellFunctional lift_to_pair(const BellFunctional& f, const Scenario& target, const PartySubset& pair) {
    if (pair.size() != 2) throw StructuralError("lift_to_pair needs a two-party subset");
    if (f.scenario().parties() != 2) throw StructuralError("lift_to_pair needs a bipartite functional");
    return lift_to_subset(f, target, pair);
}

namespace detail {

inline RationalVector ints(std::initializer_list<long> v) {
    RationalVector r;
    for (long x : v) r.emplace_back(x);
    return r;
}

} // namespace detail

/// CH, I4422_3 and I4422_11, keyed by name.
inline std::map<std::string, CgTable> catalog() {
    using detail::ints;
    std::map<std::string, CgTable> c;
    c["CH"] = CgTable{2, ints({-1, 0}), ints({-1, 0}), {ints({1, 1}), ints({1, -1})}, 0, "CH"};
    c["I4422_11"] = CgTable{4,
                            ints({-2, -1, -1, 0}),
                            ints({-2, -1, -1, 0}),
                            {ints({1, 1, 1, 2}), ints({1, 0, 2, -1}), ints({1, 2, -1, -1}), ints({2, -1, -1, -1})},
                            0,
                            "I4422_11"};
    c["I4422_3"] = CgTable{4,
                           ints({-1, 0, 0, 0}),
                           ints({-2, -1, -1, 0}),
                           {ints({1, 1, 1, 1}), ints({0, 1, 0, -1}), ints({1, -1, 1, -1}), ints({1, 0, -1, 0})},
                           0,
                           "I4422_3"};
    return c;
}

inline CgTable catalog_entry(const std::string& name) {
    auto c = catalog();
    auto it = c.find(name);
    if (it == c.end()) throw StructuralError("no catalog inequality named \"" + name + "\"");
    return it->second;
}

} // namespace bellkit
