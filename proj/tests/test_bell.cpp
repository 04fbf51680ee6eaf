#include "bellkit/analyses.hpp"
#include "bellkit/bell.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace bellkit;

namespace {

BellFunctional cat(const std::string& name) { return cg_to_functional(catalog_entry(name)); }

} // namespace

TEST(CgTable, CatalogEntriesAsPrinted) {
    const auto i11 = catalog_entry("I4422_11");
    EXPECT_EQ(i11.body[0][3], 2);
    EXPECT_EQ(i11.row, (RationalVector{-2, -1, -1, 0}));
    EXPECT_EQ(i11.col, (RationalVector{-2, -1, -1, 0}));
    EXPECT_EQ(i11.body[1], (RationalVector{1, 0, 2, -1}));
    EXPECT_EQ(i11.body[2], (RationalVector{1, 2, -1, -1}));
    EXPECT_EQ(i11.body[3], (RationalVector{2, -1, -1, -1}));
    EXPECT_EQ(i11.bound, 0);

    const auto i3 = catalog_entry("I4422_3");
    EXPECT_EQ(i3.row, (RationalVector{-1, 0, 0, 0}));
    EXPECT_EQ(i3.col, (RationalVector{-2, -1, -1, 0}));
    EXPECT_EQ(i3.body[0], (RationalVector{1, 1, 1, 1}));
    EXPECT_EQ(i3.body[1], (RationalVector{0, 1, 0, -1}));
    EXPECT_EQ(i3.body[2], (RationalVector{1, -1, 1, -1}));
    EXPECT_EQ(i3.body[3], (RationalVector{1, 0, -1, 0}));

    EXPECT_EQ(catalog().size(), 3u);
    EXPECT_THROW(catalog_entry("CHSH4"), StructuralError);
}

TEST(CgTable, MalformedTableRejected) {
    CgTable t = catalog_entry("CH");
    t.body[1].pop_back();
    EXPECT_THROW(cg_to_functional(t), StructuralError);
}

TEST(Evaluate, UniformAndDeterministicExamples) {
    EXPECT_EQ(evaluate(cat("CH"), Behavior::uniform(Scenario::uniform(2, 2, 2))), Rational(-1, 2));
    EXPECT_EQ(evaluate(cat("I4422_11"), Behavior::uniform(Scenario::uniform(2, 4, 2))), Rational(-9, 4));
    // all parties always answer the distinguished (first) outcome
    const Behavior first = Behavior::deterministic(Scenario::uniform(2, 4, 2), {{0, 0, 0, 0}, {0, 0, 0, 0}});
    EXPECT_EQ(evaluate(cat("I4422_3"), first), -1);
}

TEST(Evaluate, ChOnPrBox) {
    const Behavior pr = Behavior::pr_box();
    EXPECT_EQ(evaluate(cat("CH"), pr), Rational(1, 2));
    EXPECT_EQ(oracle::cg_value(catalog_entry("CH"), pr), Rational(1, 2));
}

TEST(Evaluate, RefusesSignalingAndMismatch) {
    const Scenario s = Scenario::uniform(2, 2, 2);
    RationalVector p(s.dimension());
    for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t v = 0; v < 2; ++v) p[s.index({u, v}, {v, 0})] = 1;
    EXPECT_THROW(evaluate(cat("CH"), Behavior(s, p)), SignalingError);
    EXPECT_THROW(evaluate(cat("CH"), Behavior::uniform(Scenario::uniform(2, 4, 2))), StructuralError);
}

TEST(Evaluate, CatalogBoundsAreTightLocalMaxima) {
    for (const auto& [name, table] : catalog()) {
        const BellFunctional f = cg_to_functional(table);
        const VertexMatrix v(f.scenario());
        Rational best = evaluate_unchecked(f, v.column(0));
        for (std::size_t k = 1; k < v.size(); ++k) best = std::max(best, evaluate_unchecked(f, v.column(k)));
        EXPECT_EQ(best, table.bound) << name;
        EXPECT_EQ(max_bell_local(f), table.bound) << name;
    }
}

TEST(Evaluate, AgreesWithDirectCgArithmetic) {
    std::mt19937 rng(17);
    for (const auto& [name, table] : catalog()) {
        const Scenario s = Scenario::uniform(2, table.m, 2);
        const BellFunctional f = cg_to_functional(table);
        for (int t = 0; t < 10; ++t) {
            const Behavior b = oracle::random_ns_behavior(s, rng, 2);
            const Rational direct = oracle::cg_value(table, b);
            EXPECT_EQ(evaluate(f, b), direct) << name;
            // any anchor gives the same marginals on a nonsignaling behavior
            EXPECT_EQ(oracle::cg_value(table, b, table.m - 1, table.m - 1), direct) << name;
        }
    }
}

TEST(Evaluate, Linearity) {
    std::mt19937 rng(4);
    const Scenario s = Scenario::uniform(2, 4, 2);
    const BellFunctional f = cat("I4422_11");
    for (int t = 0; t < 10; ++t) {
        const Behavior a = oracle::random_ns_behavior(s, rng, 1);
        const Behavior b = oracle::random_local_behavior(s, rng);
        const Rational lambda = oracle::random_fraction(rng);
        EXPECT_EQ(evaluate(f, Behavior::mixture(lambda, a, b)), lambda * evaluate(f, a) + (1 - lambda) * evaluate(f, b));
    }
}

TEST(Lift, ChOnPrTimesUniform) {
    const Scenario s3 = Scenario::uniform(3, 2, 2);
    const Behavior b = Behavior::product(Behavior::pr_box(), Behavior::uniform(Scenario::uniform(1, 2, 2)));
    EXPECT_EQ(evaluate(lift_to_pair(cat("CH"), s3, pair_ab), b), Rational(1, 2));
    EXPECT_EQ(evaluate(lift_to_pair(cat("CH"), s3, pair_bc), b), Rational(-1, 2));
}

TEST(Lift, SymmetricBehaviorUnderPartySwap) {
    // PR between parties 1 and 3 with party 2 uniform: symmetric under 1 <-> 3
    const Scenario s3 = Scenario::uniform(3, 2, 2);
    RationalVector p(s3.dimension());
    for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t v = 0; v < 2; ++v)
            for (std::size_t w = 0; w < 2; ++w)
                for (std::size_t x = 0; x < 2; ++x)
                    for (std::size_t y = 0; y < 2; ++y)
                        for (std::size_t z = 0; z < 2; ++z)
                            if ((x ^ z) == (u & w)) p[s3.index({u, v, w}, {x, y, z})] = Rational(1, 4);
    const Behavior b(s3, p);
    ASSERT_TRUE(check_nonsignaling(b).ok());
    EXPECT_EQ(evaluate(lift_to_pair(cat("CH"), s3, pair_ac), b), Rational(1, 2));
    EXPECT_EQ(evaluate(cat("CH"), marginalize(b, pair_ac)), Rational(1, 2));
}

TEST(Lift, MismatchedSubScenarioRejected) {
    EXPECT_THROW(lift_to_pair(cat("CH"), Scenario::uniform(3, 4, 2), pair_ab), StructuralError);
    EXPECT_THROW(lift_to_pair(cat("CH"), Scenario::uniform(3, 2, 2), PartySubset({1})), StructuralError);
}

TEST(Lift, LiftThenEvaluateEqualsMarginalizeThenEvaluate) {
    std::mt19937 rng(99);
    const Scenario s3 = Scenario::uniform(3, 2, 2);
    std::vector<BellFunctional> fs{cat("CH")};
    std::uniform_int_distribution<int> coeff(-4, 4);
    RationalVector c(16);
    for (auto& x : c) x = coeff(rng);
    fs.emplace_back(Scenario::uniform(2, 2, 2), c, 0, "random");
    for (int t = 0; t < 100; ++t) {
        const Behavior b = oracle::random_ns_behavior(s3, rng, 1);
        for (const auto& f : fs)
            for (const auto& pair : {pair_ab, pair_bc, pair_ac})
                ASSERT_EQ(evaluate(lift_to_pair(f, s3, pair), b), evaluate(f, marginalize(b, pair)));
    }
}

TEST(Functional, SumAndBounds) {
    const BellFunctional f = cat("CH") + cat("CH").with_bound(3);
    EXPECT_EQ(f.bound(), 3);
    EXPECT_EQ(evaluate(f, Behavior::pr_box()), 1);
    EXPECT_THROW(cat("CH") + cat("I4422_3"), StructuralError);
    EXPECT_THROW(BellFunctional(Scenario::uniform(2, 2, 2), RationalVector(3), 0, "short"), StructuralError);
}
