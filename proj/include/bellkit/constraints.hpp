#pragma once

// Linear constraint systems over behavior space: nonsignaling equalities,
// normalization, and the 0/1 marginalization maps between scenarios.

#include "bellkit/rational.hpp"
#include "bellkit/scenario.hpp"

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

namespace bellkit {

struct SparseTerm {
    std::size_t column;
    Rational coeff;
};

/// One labeled row `terms . x (== | <=) rhs`.
struct LinearRow {
    std::vector<SparseTerm> terms;
    Rational rhs;
    std::string label;

    Rational evaluate(const RationalVector& x) const {
        Rational s = 0;
        for (const auto& t : terms) s += t.coeff * x[t.column];
        return s;
    }
};

class LinearConstraintSystem {
public:
    explicit LinearConstraintSystem(std::size_t dimension) : dimension_(dimension) {}

    std::size_t dimension() const { return dimension_; }
    const std::vector<LinearRow>& equalities() const { return equalities_; }
    const std::vector<LinearRow>& inequalities() const { return inequalities_; }

    void add_equality(LinearRow row) { equalities_.push_back(checked(std::move(row))); }
    void add_inequality(LinearRow row) { inequalities_.push_back(checked(std::move(row))); }

    void append(const LinearConstraintSystem& other) {
        if (other.dimension_ != dimension_) throw StructuralError("constraint systems differ in dimension");
        equalities_.insert(equalities_.end(), other.equalities_.begin(), other.equalities_.end());
        inequalities_.insert(inequalities_.end(), other.inequalities_.begin(), other.inequalities_.end());
    }

    /// Labels of every row that `x` fails exactly.
    std::vector<std::string> violated_rows(const RationalVector& x) const {
        if (x.size() != dimension_) throw StructuralError("vector length does not match constraint dimension");
        std::vector<std::string> bad;
        for (const auto& r : equalities_)
            if (r.evaluate(x) != r.rhs) bad.push_back(r.label);
        for (const auto& r : inequalities_)
            if (r.evaluate(x) > r.rhs) bad.push_back(r.label);
        return bad;
    }

    bool satisfied_by(const RationalVector& x) const { return violated_rows(x).empty(); }

    void print(std::ostream& os) const {
        auto dump = [&os](const LinearRow& r, const char* op) {
            os << r.label << ":";
            for (const auto& t : r.terms) os << ' ' << (sgn(t.coeff) >= 0 ? "+" : "") << t.coeff.get_str() << "*p" << t.column;
            os << ' ' << op << ' ' << r.rhs.get_str() << '\n';
        };
        for (const auto& r : equalities_) dump(r, "=");
        for (const auto& r : inequalities_) dump(r, "<=");
    }

private:
    LinearRow checked(LinearRow row) const {
        for (const auto& t : row.terms)
            if (t.column >= dimension_) throw StructuralError("row \"" + row.label + "\" refers past the dimension");
        return row;
    }

    std::size_t dimension_;
    std::vector<LinearRow> equalities_;
    std::vector<LinearRow> inequalities_;
};

namespace detail {

/// Reassembles a full joint tuple from the digits of a subset and of its complement.
inline Digits merge_digits(const PartySubset& subset, const Digits& sub, const PartySubset& rest, const Digits& other) {
    Digits full(subset.size() + rest.size());
    for (std::size_t i = 0; i < subset.size(); ++i) full[subset[i]] = sub[i];
    for (std::size_t i = 0; i < rest.size(); ++i) full[rest[i]] = other[i];
    return full;
}

inline std::vector<std::size_t> radices_of(const std::vector<std::size_t>& all, const PartySubset& subset) {
    std::vector<std::size_t> r;
    for (auto p : subset.parties()) r.push_back(all[p]);
    return r;
}

} // namespace detail

/// Indices of every entry P(x_S, x_rest | u_S, u_rest) for fixed (u_S, x_S, u_rest),
/// i.e. the terms summed into one marginal probability of the parties in S.
inline std::vector<std::size_t> marginal_support(const Scenario& s, const PartySubset& subset, const Digits& sub_inputs,
                                                 const Digits& sub_outputs, const Digits& rest_inputs) {
    const PartySubset rest = subset.complement(s.parties());
    const auto rest_out = detail::radices_of(s.outputs(), rest);
    const Digits in = detail::merge_digits(subset, sub_inputs, rest, rest_inputs);
    const std::size_t n_rest_out = product(rest_out);
    std::vector<std::size_t> cols;
    cols.reserve(n_rest_out);
    for (std::size_t r = 0; r < n_rest_out; ++r)
        cols.push_back(s.index(in, detail::merge_digits(subset, sub_outputs, rest, unflatten(r, rest_out))));
    return cols;
}

/// Nonsignaling equalities for every nonempty proper party subset S: the
/// marginal of S at (u_S, x_S) is the same whether the remaining parties use
/// their anchor input (all first inputs) or any other joint input.
/// Rows have the form `sum(anchor) - sum(other) = 0`. Redundant rows are kept.
inline LinearConstraintSystem ns_constraint_system(const Scenario& s) {
    LinearConstraintSystem sys(s.dimension());
    const std::size_t n = s.parties();
    if (n < 2) return sys;
    for (std::uint64_t mask = 1; mask + 1 < (std::uint64_t{1} << n); ++mask) {
        const PartySubset subset = PartySubset::from_mask(mask, n);
        const PartySubset rest = subset.complement(n);
        const auto sub_in = detail::radices_of(s.inputs(), subset);
        const auto sub_out = detail::radices_of(s.outputs(), subset);
        const auto rest_in = detail::radices_of(s.inputs(), rest);
        const Digits anchor(rest.size(), 0);
        for (std::size_t ui = 0; ui < product(sub_in); ++ui) {
            const Digits u = unflatten(ui, sub_in);
            for (std::size_t xi = 0; xi < product(sub_out); ++xi) {
                const Digits x = unflatten(xi, sub_out);
                const auto base = marginal_support(s, subset, u, x, anchor);
                for (std::size_t ci = 1; ci < product(rest_in); ++ci) {
                    const Digits c = unflatten(ci, rest_in);
                    LinearRow row;
                    for (auto col : base) row.terms.push_back({col, 1});
                    for (auto col : marginal_support(s, subset, u, x, c)) row.terms.push_back({col, -1});
                    row.rhs = 0;
                    row.label = "ns S=" + subset.describe() + " u=" + describe_digits(u) + " x=" + describe_digits(x) +
                                " rest " + describe_digits(anchor) + " vs " + describe_digits(c);
                    sys.add_equality(std::move(row));
                }
            }
        }
    }
    return sys;
}

/// One row per joint input: the outputs sum to one.
inline LinearConstraintSystem normalization_constraints(const Scenario& s) {
    LinearConstraintSystem sys(s.dimension());
    for (std::size_t b = 0; b < s.input_blocks(); ++b) {
        LinearRow row;
        for (std::size_t x = 0; x < s.output_block(); ++x) row.terms.push_back({s.index(b, x), 1});
        row.rhs = 1;
        row.label = "norm u=" + describe_digits(s.input_digits(b));
        sys.add_equality(std::move(row));
    }
    return sys;
}

/// Sparse 0/1 linear map from a scenario's behavior space onto the behavior
/// space of a party subset: sums out the dropped outputs with the dropped
/// inputs fixed at `anchor`.
class MarginalOperator {
public:
    MarginalOperator(const Scenario& from, const PartySubset& subset, Digits anchor)
        : from_(from), to_(from.restrict_to(subset)), subset_(subset), anchor_(std::move(anchor)) {
        const PartySubset rest = subset.complement(from.parties());
        if (anchor_.size() != rest.size()) throw StructuralError("marginal anchor length differs from dropped parties");
        for (std::size_t i = 0; i < rest.size(); ++i)
            if (anchor_[i] >= from.inputs()[rest[i]]) throw StructuralError("marginal anchor input out of range");
        rows_.resize(to_.dimension());
        for (std::size_t b = 0; b < to_.input_blocks(); ++b)
            for (std::size_t x = 0; x < to_.output_block(); ++x)
                rows_[to_.index(b, x)] =
                    marginal_support(from, subset, to_.input_digits(b), to_.output_digits(x), anchor_);
    }

    const Scenario& from() const { return from_; }
    const Scenario& to() const { return to_; }
    const PartySubset& subset() const { return subset_; }
    const Digits& anchor() const { return anchor_; }
    /// Column indices carrying a 1 in each row.
    const std::vector<std::vector<std::size_t>>& rows() const { return rows_; }

    RationalVector apply(const RationalVector& p) const {
        if (p.size() != from_.dimension()) throw StructuralError("marginal operator: vector length mismatch");
        RationalVector out(rows_.size());
        for (std::size_t r = 0; r < rows_.size(); ++r)
            for (auto c : rows_[r]) out[r] += p[c];
        return out;
    }

    /// Row vector times the map: returns w^T M on the source space.
    RationalVector pull_back(const RationalVector& w) const {
        if (w.size() != to_.dimension()) throw StructuralError("marginal operator: covector length mismatch");
        RationalVector out(from_.dimension());
        for (std::size_t r = 0; r < rows_.size(); ++r)
            if (sgn(w[r]) != 0)
                for (auto c : rows_[r]) out[c] += w[r];
        return out;
    }

private:
    Scenario from_;
    Scenario to_;
    PartySubset subset_;
    Digits anchor_;
    std::vector<std::vector<std::size_t>> rows_;
};

inline MarginalOperator marginal_operator(const Scenario& s, const PartySubset& subset) {
    subset.check_within(s.parties());
    return MarginalOperator(s, subset, Digits(s.parties() - subset.size(), 0));
}

} // namespace bellkit
