#pragma once

// Behaviors (conditional probability tables) with exact validation,
// nonsignaling checks and marginalization.

#include "bellkit/constraints.hpp"
#include "bellkit/rational.hpp"
#include "bellkit/scenario.hpp"

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace bellkit {

/// Raised when an operation needs a nonsignaling behavior and gets one that signals.
class SignalingError : public std::runtime_error {
public:
    SignalingError(const std::string& what, std::string row) : std::runtime_error(what), row_(std::move(row)) {}
    const std::string& violated_row() const { return row_; }

private:
    std::string row_;
};

class Behavior {
public:
    Behavior(Scenario scenario, RationalVector p) : scenario_(std::move(scenario)), p_(std::move(p)) {
        if (p_.size() != scenario_.dimension())
            throw StructuralError("behavior has " + std::to_string(p_.size()) + " entries, scenario (" +
                                  scenario_.describe() + ") needs " + std::to_string(scenario_.dimension()));
    }

    const Scenario& scenario() const { return scenario_; }
    const RationalVector& p() const { return p_; }
    const Rational& operator[](std::size_t i) const { return p_[i]; }
    const Rational& at(const Digits& inputs, const Digits& outputs) const { return p_[scenario_.index(inputs, outputs)]; }

    static Behavior uniform(const Scenario& s) {
        return Behavior(s, RationalVector(s.dimension(), Rational(1, s.output_block())));
    }

    /// Product of deterministic single-party strategies; strategies[k][u] is
    /// party k's output on input u.
    static Behavior deterministic(const Scenario& s, const std::vector<std::vector<std::size_t>>& strategies) {
        if (strategies.size() != s.parties()) throw StructuralError("one strategy per party required");
        for (std::size_t k = 0; k < s.parties(); ++k) {
            if (strategies[k].size() != s.inputs()[k]) throw StructuralError("strategy table length differs from input count");
            for (auto x : strategies[k])
                if (x >= s.outputs()[k]) throw StructuralError("strategy output out of range");
        }
        RationalVector p(s.dimension());
        for (std::size_t b = 0; b < s.input_blocks(); ++b) {
            const Digits u = s.input_digits(b);
            Digits x(s.parties());
            for (std::size_t k = 0; k < s.parties(); ++k) x[k] = strategies[k][u[k]];
            p[s.index(u, x)] = 1;
        }
        return Behavior(s, std::move(p));
    }

    /// PR box on 2 inputs / 2 outputs: P(x,y|u,v) = 1/2 iff x xor y = u and v.
    static Behavior pr_box() {
        const Scenario s = Scenario::uniform(2, 2, 2);
        RationalVector p(s.dimension());
        for (std::size_t u = 0; u < 2; ++u)
            for (std::size_t v = 0; v < 2; ++v)
                for (std::size_t x = 0; x < 2; ++x)
                    for (std::size_t y = 0; y < 2; ++y)
                        p[s.index({u, v}, {x, y})] = ((x ^ y) == (u & v)) ? Rational(1, 2) : Rational(0);
        return Behavior(s, std::move(p));
    }

    /// Independent composition: parties of `a` followed by parties of `b`.
    static Behavior product(const Behavior& a, const Behavior& b) {
        const auto& sa = a.scenario();
        const auto& sb = b.scenario();
        auto in = sa.inputs(), out = sa.outputs();
        in.insert(in.end(), sb.inputs().begin(), sb.inputs().end());
        out.insert(out.end(), sb.outputs().begin(), sb.outputs().end());
        const Scenario s(in, out);
        RationalVector p(s.dimension());
        for (std::size_t ba = 0; ba < sa.input_blocks(); ++ba)
            for (std::size_t bb = 0; bb < sb.input_blocks(); ++bb)
                for (std::size_t xa = 0; xa < sa.output_block(); ++xa)
                    for (std::size_t xb = 0; xb < sb.output_block(); ++xb)
                        p[s.index(ba * sb.input_blocks() + bb, xa * sb.output_block() + xb)] =
                            a[sa.index(ba, xa)] * b[sb.index(bb, xb)];
        return Behavior(s, std::move(p));
    }

    /// lambda * a + (1 - lambda) * b
    static Behavior mixture(const Rational& lambda, const Behavior& a, const Behavior& b) {
        if (!(a.scenario() == b.scenario())) throw StructuralError("mixture of behaviors on different scenarios");
        RationalVector p(a.p_.size());
        for (std::size_t i = 0; i < p.size(); ++i) p[i] = lambda * a.p_[i] + (1 - lambda) * b.p_[i];
        return Behavior(a.scenario(), std::move(p));
    }

    friend bool operator==(const Behavior& a, const Behavior& b) { return a.scenario_ == b.scenario_ && a.p_ == b.p_; }

private:
    Scenario scenario_;
    RationalVector p_;
};

struct Violation {
    enum class Kind { Positivity, Normalization };
    Kind kind;
    std::size_t index; // entry index for positivity, input block for normalization
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

/// Positivity of every entry and normalization of every input block, exactly.
inline ValidationReport validate(const Behavior& b) {
    const Scenario& s = b.scenario();
    ValidationReport report;
    for (std::size_t i = 0; i < s.dimension(); ++i)
        if (sgn(b[i]) < 0) {
            const std::size_t block = i / s.output_block();
            report.violations.push_back(
                {Violation::Kind::Positivity, i,
                 "negative entry " + b[i].get_str() + " at index " + std::to_string(i) + " (u=" +
                     describe_digits(s.input_digits(block)) +
                     " x=" + describe_digits(s.output_digits(i % s.output_block())) + ")"});
        }
    for (std::size_t block = 0; block < s.input_blocks(); ++block) {
        Rational sum = 0;
        for (std::size_t x = 0; x < s.output_block(); ++x) sum += b[s.index(block, x)];
        if (sum != 1)
            report.violations.push_back({Violation::Kind::Normalization, block,
                                         "outputs for input u=" + describe_digits(s.input_digits(block)) + " sum to " +
                                             sum.get_str()});
    }
    return report;
}

struct NonsignalingReport {
    std::vector<std::string> violated; // labels of failed rows of ns_constraint_system
    bool ok() const { return violated.empty(); }
};

inline NonsignalingReport check_nonsignaling(const Behavior& b) {
    return {ns_constraint_system(b.scenario()).violated_rows(b.p())};
}

inline void require_nonsignaling(const Behavior& b, const std::string& context) {
    const auto report = check_nonsignaling(b);
    if (!report.ok())
        throw SignalingError(context + ": behavior is signaling (violates " + report.violated.front() + ")",
                             report.violated.front());
}

/// Marginal on `subset` with dropped parties' inputs fixed at `anchor`; no
/// nonsignaling check. Exposed for tests of anchor independence.
inline Behavior marginalize_at(const Behavior& b, const PartySubset& subset, const Digits& anchor) {
    const MarginalOperator m(b.scenario(), subset, anchor);
    return Behavior(m.to(), m.apply(b.p()));
}

/// Marginal behavior of the parties in `subset`. Refuses signaling behaviors,
/// for which the marginal would depend on the dropped parties' inputs.
inline Behavior marginalize(const Behavior& b, const PartySubset& subset) {
    subset.check_within(b.scenario().parties());
    require_nonsignaling(b, "marginalize");
    const MarginalOperator m = marginal_operator(b.scenario(), subset);
    return Behavior(m.to(), m.apply(b.p()));
}

} // namespace bellkit
