#include "bellkit/behavior.hpp"
#include "bellkit/vertices.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

using namespace bellkit;

TEST(Vertices, Counts) {
    EXPECT_EQ(enumerate_local_deterministic(Scenario::uniform(2, 2, 2)).size(), 16u);
    EXPECT_EQ(enumerate_local_deterministic(Scenario::uniform(2, 4, 2)).size(), 256u);
    EXPECT_EQ(enumerate_local_deterministic(Scenario::uniform(3, 4, 2)).size(), 4096u);
    EXPECT_EQ(vertex_count(Scenario({3, 1}, {2, 5})), mpz_class(40));
}

TEST(Vertices, CapExceededReportsCount) {
    try {
        VertexMatrix v(Scenario::uniform(3, 4, 2), 4095);
        FAIL() << "expected SizeError";
    } catch (const SizeError& e) {
        EXPECT_EQ(e.count(), mpz_class(4096));
        EXPECT_NE(std::string(e.what()).find("4096"), std::string::npos);
    }
    try {
        VertexMatrix v(Scenario::uniform(3, 10, 3));
        FAIL() << "expected SizeError";
    } catch (const SizeError& e) {
        mpz_class expected;
        mpz_ui_pow_ui(expected.get_mpz_t(), 3, 30);
        EXPECT_EQ(e.count(), expected);
    }
}

TEST(Vertices, CanonicalOrder) {
    const VertexMatrix v(Scenario::uniform(2, 2, 2));
    // party 1's table is most significant, its first input's output most significant
    EXPECT_EQ(v.strategies(0), (std::vector<std::vector<std::size_t>>{{0, 0}, {0, 0}}));
    EXPECT_EQ(v.strategies(1), (std::vector<std::vector<std::size_t>>{{0, 0}, {0, 1}}));
    EXPECT_EQ(v.strategies(2), (std::vector<std::vector<std::size_t>>{{0, 0}, {1, 0}}));
    EXPECT_EQ(v.strategies(4), (std::vector<std::vector<std::size_t>>{{0, 1}, {0, 0}}));
    EXPECT_EQ(v.strategies(15), (std::vector<std::vector<std::size_t>>{{1, 1}, {1, 1}}));
    for (std::size_t k = 0; k < v.size(); ++k) EXPECT_EQ(v.index_of(v.strategies(k)), k);
}

TEST(Vertices, ColumnsDistinctAndOneHotPerBlock) {
    const Scenario s({2, 3}, {3, 2});
    const VertexMatrix v(s);
    std::set<std::vector<std::size_t>> seen;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const auto supp = v.support(k);
        ASSERT_EQ(supp.size(), s.input_blocks());
        for (std::size_t b = 0; b < supp.size(); ++b) EXPECT_EQ(supp[b] / s.output_block(), b);
        EXPECT_TRUE(seen.insert(supp).second);
        const Behavior col = v.column(k);
        for (std::size_t i = 0; i < s.dimension(); ++i)
            EXPECT_EQ(col[i], std::find(supp.begin(), supp.end(), i) != supp.end() ? 1 : 0);
    }
}

namespace {

// Row check on 0/1 columns with integer arithmetic: the sum of coefficients
// over the support.
bool satisfies_on_support(const LinearConstraintSystem& sys, const std::vector<std::size_t>& supp) {
    std::vector<char> one(sys.dimension(), 0);
    for (auto i : supp) one[i] = 1;
    for (const auto& r : sys.equalities()) {
        long acc = 0;
        for (const auto& t : r.terms)
            if (one[t.column]) acc += t.coeff.get_num().get_si();
        if (acc != r.rhs) return false;
    }
    return true;
}

} // namespace

TEST(Vertices, EveryVertexIsNormalizedAndNonsignaling) {
    for (std::size_t n = 1; n <= 3; ++n)
        for (std::size_t m = 1; m <= 4; ++m) {
            const Scenario s = Scenario::uniform(n, m, 2);
            const auto ns = ns_constraint_system(s);
            const auto norm = normalization_constraints(s);
            const VertexMatrix v(s);
            for (std::size_t k = 0; k < v.size(); ++k) {
                const auto supp = v.support(k);
                ASSERT_TRUE(satisfies_on_support(ns, supp)) << s.describe() << " vertex " << k;
                ASSERT_TRUE(satisfies_on_support(norm, supp)) << s.describe() << " vertex " << k;
            }
        }
}

TEST(Vertices, SampledColumnsPassExactChecks) {
    const Scenario s = Scenario::uniform(3, 4, 2);
    const VertexMatrix v(s);
    for (std::size_t k = 0; k < v.size(); k += 97) {
        const Behavior b = v.column(k);
        EXPECT_TRUE(validate(b).ok());
        EXPECT_TRUE(check_nonsignaling(b).ok());
    }
}

TEST(Constraints, RowCountsAndLabels) {
    EXPECT_EQ(normalization_constraints(Scenario::uniform(2, 2, 2)).equalities().size(), 4u);
    EXPECT_EQ(normalization_constraints(Scenario::uniform(3, 4, 2)).equalities().size(), 64u);
    const auto ns = ns_constraint_system(Scenario::uniform(2, 2, 2));
    // S={1}: 2 inputs x 2 outputs x 1 other input, same for S={2}
    EXPECT_EQ(ns.equalities().size(), 8u);
    for (const auto& r : ns.equalities()) {
        EXPECT_FALSE(r.label.empty());
        EXPECT_EQ(r.rhs, 0);
    }
    EXPECT_TRUE(normalization_constraints(Scenario::uniform(3, 2, 3)).satisfied_by(Behavior::uniform(Scenario::uniform(3, 2, 3)).p()));
}

TEST(Constraints, OneHotSignalingBehaviorViolatesLabeledRow) {
    // Bob outputs Alice's input.
    const Scenario s = Scenario::uniform(2, 2, 2);
    RationalVector p(s.dimension());
    for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t v = 0; v < 2; ++v) p[s.index({u, v}, {0, u})] = 1;
    const auto bad = ns_constraint_system(s).violated_rows(p);
    ASSERT_FALSE(bad.empty());
    EXPECT_NE(bad.front().find("S={2}"), std::string::npos);
}

TEST(Constraints, PrBoxSatisfiesSystem) {
    EXPECT_TRUE(ns_constraint_system(Scenario::uniform(2, 2, 2)).satisfied_by(Behavior::pr_box().p()));
}

TEST(MarginalOperator, AllPartiesIsIdentity) {
    const Scenario s({2, 3}, {2, 2});
    const auto m = marginal_operator(s, PartySubset({0, 1}));
    std::mt19937 rng(1);
    RationalVector p(s.dimension());
    for (auto& x : p) x = oracle::random_fraction(rng);
    EXPECT_EQ(m.apply(p), p);
    for (const auto& row : m.rows()) EXPECT_EQ(row.size(), 1u);
}

TEST(MarginalOperator, UniformMapsToUniform) {
    const Scenario s = Scenario::uniform(3, 4, 2);
    const auto m = marginal_operator(s, PartySubset({0, 2}));
    EXPECT_EQ(m.apply(Behavior::uniform(s).p()), Behavior::uniform(Scenario::uniform(2, 4, 2)).p());
}

TEST(MarginalOperator, VertexMapsToRestrictedVertex) {
    const Scenario s({2, 3, 2}, {2, 2, 3});
    const VertexMatrix v(s);
    for (std::uint64_t mask = 1; mask < 8; ++mask) {
        const PartySubset sub = PartySubset::from_mask(mask, 3);
        const auto m = marginal_operator(s, sub);
        const VertexMatrix vs(s.restrict_to(sub));
        for (std::size_t k = 0; k < v.size(); k += 5) {
            const auto st = v.strategies(k);
            std::vector<std::vector<std::size_t>> restricted;
            for (auto p : sub.parties()) restricted.push_back(st[p]);
            EXPECT_EQ(m.apply(v.column(k).p()), vs.column(vs.index_of(restricted)).p());
        }
    }
}

TEST(MarginalOperator, CommutesWithConvexCombination) {
    std::mt19937 rng(11);
    const Scenario s = Scenario::uniform(3, 2, 2);
    const auto m = marginal_operator(s, PartySubset({1, 2}));
    for (int t = 0; t < 20; ++t) {
        const Behavior a = oracle::random_local_behavior(s, rng);
        const Behavior b = oracle::random_ns_behavior(s, rng, 1);
        const Rational lambda = oracle::random_fraction(rng);
        const RationalVector mixed = m.apply(Behavior::mixture(lambda, a, b).p());
        const RationalVector ma = m.apply(a.p()), mb = m.apply(b.p());
        for (std::size_t i = 0; i < mixed.size(); ++i) EXPECT_EQ(mixed[i], lambda * ma[i] + (1 - lambda) * mb[i]);
    }
}

TEST(MarginalOperator, PullBackIsTranspose) {
    std::mt19937 rng(5);
    const Scenario s({2, 2, 3}, {2, 3, 2});
    const auto m = marginal_operator(s, PartySubset({0, 2}));
    RationalVector p(s.dimension()), w(m.to().dimension());
    for (auto& x : p) x = oracle::random_fraction(rng);
    for (auto& x : w) x = oracle::random_fraction(rng) - Rational(1, 2);
    EXPECT_EQ(dot(w, m.apply(p)), dot(m.pull_back(w), p));
}

TEST(SubScenario, MarginalsOfNonsignalingStayNonsignaling) {
    // exhaustive over subsets, on random NS behaviors of small scenarios
    std::mt19937 rng(23);
    for (const Scenario& s : {Scenario::uniform(3, 2, 2), Scenario({2, 3, 2}, {2, 2, 2}), Scenario::uniform(2, 3, 3)}) {
        for (int t = 0; t < 3; ++t) {
            const Behavior b = oracle::random_ns_behavior(s, rng, 2);
            for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << s.parties()); ++mask)
                EXPECT_TRUE(check_nonsignaling(marginalize(b, PartySubset::from_mask(mask, s.parties()))).ok());
        }
    }
}
