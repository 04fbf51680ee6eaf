#pragma once

// Local-deterministic vertices of the local polytope.

#include "bellkit/behavior.hpp"
#include "bellkit/scenario.hpp"

#include <gmpxx.h>

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bellkit {

inline constexpr std::size_t default_vertex_cap = std::size_t{1} << 20;

class SizeError : public std::runtime_error {
public:
    SizeError(const std::string& what, mpz_class count) : std::runtime_error(what), count_(std::move(count)) {}
    const mpz_class& count() const { return count_; }

private:
    mpz_class count_;
};

/// Exact number of local-deterministic vertices, prod_k o_k^m_k.
inline mpz_class vertex_count(const Scenario& s) {
    mpz_class count = 1;
    for (std::size_t k = 0; k < s.parties(); ++k) {
        mpz_class f;
        mpz_ui_pow_ui(f.get_mpz_t(), s.outputs()[k], s.inputs()[k]);
        count *= f;
    }
    return count;
}

/// The deterministic vertices in canonical order: lexicographic over the
/// per-party function tables (party 1 most significant; within a table,
/// the output on the first input is most significant). Columns are generated
/// on demand from their index.
class VertexMatrix {
public:
    explicit VertexMatrix(Scenario s, std::size_t cap = default_vertex_cap) : scenario_(std::move(s)) {
        const mpz_class count = vertex_count(scenario_);
        if (count > mpz_class(std::to_string(cap)))
            throw SizeError("local-deterministic enumeration needs " + count.get_str() + " vertices, cap is " +
                                std::to_string(cap),
                            count);
        count_ = count.get_ui();
        for (std::size_t k = 0; k < scenario_.parties(); ++k)
            tables_.push_back(std::vector<std::size_t>(scenario_.inputs()[k], scenario_.outputs()[k]));
        for (const auto& t : tables_) table_counts_.push_back(bellkit::product(t));
    }

    const Scenario& scenario() const { return scenario_; }
    std::size_t size() const { return count_; }

    /// strategies(v)[k][u] = output of party k on input u.
    std::vector<std::vector<std::size_t>> strategies(std::size_t v) const {
        const Digits per_party = unflatten(v, table_counts_);
        std::vector<std::vector<std::size_t>> st;
        for (std::size_t k = 0; k < per_party.size(); ++k) st.push_back(unflatten(per_party[k], tables_[k]));
        return st;
    }

    /// Entry indices holding a 1, one per joint input block, in block order.
    std::vector<std::size_t> support(std::size_t v) const {
        const auto st = strategies(v);
        std::vector<std::size_t> ones(scenario_.input_blocks());
        for (std::size_t b = 0; b < scenario_.input_blocks(); ++b) {
            const Digits u = scenario_.input_digits(b);
            Digits x(u.size());
            for (std::size_t k = 0; k < u.size(); ++k) x[k] = st[k][u[k]];
            ones[b] = scenario_.index(u, x);
        }
        return ones;
    }

    Behavior column(std::size_t v) const { return Behavior::deterministic(scenario_, strategies(v)); }

    /// Index of the vertex whose function tables are `st`.
    std::size_t index_of(const std::vector<std::vector<std::size_t>>& st) const {
        Digits per_party;
        for (std::size_t k = 0; k < st.size(); ++k) per_party.push_back(flatten(st[k], tables_[k]));
        return flatten(per_party, table_counts_);
    }

private:
    Scenario scenario_;
    std::size_t count_ = 0;
    std::vector<std::vector<std::size_t>> tables_;
    std::vector<std::size_t> table_counts_;
};

inline VertexMatrix enumerate_local_deterministic(const Scenario& s, std::size_t cap = default_vertex_cap) {
    return VertexMatrix(s, cap);
}

} // namespace bellkit
