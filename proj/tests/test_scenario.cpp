#include "bellkit/behavior.hpp"
#include "bellkit/io.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace bellkit;

TEST(Rational, ParsesAndRendersCanonically) {
    EXPECT_EQ(parse_rational("2/4"), Rational(1, 2));
    EXPECT_EQ(parse_rational("-6/3"), Rational(-2));
    EXPECT_EQ(parse_rational("7"), Rational(7));
    EXPECT_EQ(to_string(parse_rational("4/6")), "2/3");
    EXPECT_EQ(to_string(parse_rational("-0/5")), "0");
    for (const char* bad : {"1/0", "", "/", "1/", "a/b", "1.5", "1/-2", " 1", "1e3", "--1"})
        EXPECT_THROW(parse_rational(bad), ParseError) << bad;
}

TEST(Rational, RenderParseRoundTrip) {
    std::mt19937 rng(7);
    std::uniform_int_distribution<long> num(-1000000, 1000000), den(1, 1000000);
    for (int i = 0; i < 500; ++i) {
        Rational r(num(rng), den(rng));
        r.canonicalize();
        EXPECT_EQ(parse_rational(to_string(r)), r);
    }
    Rational big(mpz_class("123456789012345678901234567890"), mpz_class("98765432109876543210"));
    big.canonicalize();
    EXPECT_EQ(parse_rational(to_string(big)), big);
}

TEST(Rational, DecimalDisplay) {
    EXPECT_EQ(to_decimal(Rational(2, 3)), "0.666667");
    EXPECT_EQ(to_decimal(Rational(-1, 3)), "-0.333333");
    EXPECT_EQ(to_decimal(Rational(4, 3)), "1.333333");
    EXPECT_EQ(to_decimal(Rational(0)), "0.000000");
    EXPECT_EQ(to_decimal(Rational(-1, 10000000)), "0.000000");
}

TEST(Scenario, DimensionAndIndexLayout) {
    const Scenario s({2, 3}, {2, 2});
    EXPECT_EQ(s.dimension(), 6u * 4u);
    // inputs outer, outputs inner, party 1 most significant
    EXPECT_EQ(s.index({0, 0}, {0, 0}), 0u);
    EXPECT_EQ(s.index({0, 0}, {0, 1}), 1u);
    EXPECT_EQ(s.index({0, 0}, {1, 0}), 2u);
    EXPECT_EQ(s.index({0, 1}, {0, 0}), 4u);
    EXPECT_EQ(s.index({1, 0}, {0, 0}), 12u);
    EXPECT_EQ(s.index({1, 2}, {1, 1}), 23u);
    EXPECT_EQ(Scenario::uniform(3, 4, 2).dimension(), 512u);
    EXPECT_THROW(Scenario({2}, {1}), StructuralError);
    EXPECT_THROW(Scenario({0}, {2}), StructuralError);
    EXPECT_THROW(Scenario({}, {}), StructuralError);
    EXPECT_THROW(PartySubset({1, 0}), StructuralError);
    EXPECT_THROW(PartySubset({1, 1}), StructuralError);
}

TEST(Validate, UniformIsOk) {
    EXPECT_TRUE(validate(Behavior::uniform(Scenario::uniform(3, 2, 2))).ok());
    EXPECT_TRUE(validate(Behavior::uniform(Scenario({2, 3}, {3, 2}))).ok());
}

TEST(Validate, NegativeEntryIsReportedAtItsIndex) {
    const Scenario s = Scenario::uniform(2, 2, 2);
    RationalVector p = Behavior::uniform(s).p();
    p[5] = Rational(-1, 4);
    p[4] = Rational(3, 4); // keep the block normalized
    const auto r = validate(Behavior(s, p));
    ASSERT_EQ(r.violations.size(), 1u);
    EXPECT_EQ(r.violations[0].kind, Violation::Kind::Positivity);
    EXPECT_EQ(r.violations[0].index, 5u);
}

TEST(Validate, NormalizationViolationNamesTheInput) {
    const Scenario s = Scenario::uniform(2, 2, 2);
    RationalVector p = Behavior::uniform(s).p();
    p[s.index({1, 0}, {0, 0})] = Rational(3, 4); // block u=(2,1) sums to 3/2
    const auto r = validate(Behavior(s, p));
    ASSERT_EQ(r.violations.size(), 1u);
    EXPECT_EQ(r.violations[0].kind, Violation::Kind::Normalization);
    EXPECT_EQ(r.violations[0].index, 2u);
    EXPECT_NE(r.violations[0].message.find("u=(2,1)"), std::string::npos);
    EXPECT_NE(r.violations[0].message.find("3/2"), std::string::npos);
}

TEST(Validate, DimensionMismatchIsStructural) {
    EXPECT_THROW(Behavior(Scenario::uniform(2, 2, 2), RationalVector(15)), StructuralError);
}

TEST(Nonsignaling, ProductsAreNonsignaling) {
    const Behavior a = Behavior::deterministic(Scenario::uniform(1, 3, 2), {{1, 0, 1}});
    const Behavior b = Behavior::uniform(Scenario({2}, {3}));
    const Behavior c = Behavior::pr_box();
    EXPECT_TRUE(check_nonsignaling(Behavior::product(a, b)).ok());
    EXPECT_TRUE(check_nonsignaling(Behavior::product(Behavior::product(a, b), c)).ok());
}

TEST(Nonsignaling, PrBoxAgreesWithDirectEnumeration) {
    const Behavior pr = Behavior::pr_box();
    ASSERT_TRUE(oracle::bipartite_nonsignaling(pr));
    EXPECT_TRUE(check_nonsignaling(pr).ok());
}

TEST(Nonsignaling, SignalingCounterexampleIsIdentified) {
    // Alice outputs Bob's input: her marginal depends on v.
    const Scenario s = Scenario::uniform(2, 2, 2);
    RationalVector p(s.dimension());
    for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t v = 0; v < 2; ++v) p[s.index({u, v}, {v, 0})] = 1;
    const Behavior b(s, p);
    ASSERT_TRUE(validate(b).ok());
    ASSERT_FALSE(oracle::bipartite_nonsignaling(b));
    const auto r = check_nonsignaling(b);
    ASSERT_FALSE(r.ok());
    EXPECT_NE(r.violated.front().find("S={1}"), std::string::npos);
}

TEST(Marginalize, ProductOfDeterministicStrategies) {
    const Scenario s = Scenario::uniform(3, 2, 2);
    const Behavior b = Behavior::deterministic(s, {{0, 1}, {1, 1}, {1, 0}});
    const Behavior m = marginalize(b, PartySubset({0, 2}));
    EXPECT_EQ(m, Behavior::deterministic(Scenario::uniform(2, 2, 2), {{0, 1}, {1, 0}}));
}

TEST(Marginalize, UniformToSingleParty) {
    const Behavior m = marginalize(Behavior::uniform(Scenario::uniform(3, 4, 2)), PartySubset({1}));
    EXPECT_EQ(m, Behavior::uniform(Scenario::uniform(1, 4, 2)));
}

TEST(Marginalize, RefusesSignalingBehavior) {
    const Scenario s = Scenario::uniform(2, 2, 2);
    RationalVector p(s.dimension());
    for (std::size_t u = 0; u < 2; ++u)
        for (std::size_t v = 0; v < 2; ++v) p[s.index({u, v}, {v, 0})] = 1;
    try {
        marginalize(Behavior(s, p), PartySubset({0}));
        FAIL() << "expected SignalingError";
    } catch (const SignalingError& e) {
        EXPECT_FALSE(e.violated_row().empty());
    }
}

namespace {

std::vector<Digits> all_anchors(const Scenario& s, const PartySubset& subset) {
    const PartySubset rest = subset.complement(s.parties());
    std::vector<std::size_t> radices;
    for (auto p : rest.parties()) radices.push_back(s.inputs()[p]);
    std::vector<Digits> out;
    for (std::size_t i = 0; i < product(radices); ++i) out.push_back(unflatten(i, radices));
    return out;
}

} // namespace

class MarginalProperties : public ::testing::TestWithParam<int> {};

TEST_P(MarginalProperties, AnchorIndependenceCompositionAndValidity) {
    std::mt19937 rng(static_cast<unsigned>(GetParam()));
    const Scenario s({2, 2, 3}, {2, 3, 2});
    const Behavior b = oracle::random_ns_behavior(s, rng);
    ASSERT_TRUE(validate(b).ok());
    ASSERT_TRUE(check_nonsignaling(b).ok());
    for (std::uint64_t mask = 1; mask < 7; ++mask) {
        const PartySubset sub = PartySubset::from_mask(mask, 3);
        const Behavior m = marginalize(b, sub);
        EXPECT_TRUE(validate(m).ok());
        EXPECT_TRUE(check_nonsignaling(m).ok());
        for (const auto& anchor : all_anchors(s, sub)) EXPECT_EQ(marginalize_at(b, sub, anchor), m);
        // nested: marginalize(marginalize(b, sub), inner) == marginalize(b, sub o inner)
        for (std::uint64_t inner = 1; inner < (std::uint64_t{1} << sub.size()); ++inner) {
            const PartySubset in = PartySubset::from_mask(inner, sub.size());
            EXPECT_EQ(marginalize(m, in), marginalize(b, sub.compose(in)));
        }
    }
}

INSTANTIATE_TEST_SUITE_P(RandomNs, MarginalProperties, ::testing::Range(1, 9));

TEST(BehaviorFile, RoundTripAndErrors) {
    std::mt19937 rng(3);
    const Behavior b = oracle::random_ns_behavior(Scenario::uniform(2, 3, 2), rng);
    EXPECT_EQ(behavior_from_json(Json::parse(behavior_to_json(b).dump())), b);

    const Json bad_rational = Json::parse(R"({"scenario":{"parties":1,"inputs":[1],"outputs":[2]},"p":["1/0","1"]})");
    EXPECT_THROW(behavior_from_json(bad_rational), ParseError);
    const Json floats = Json::parse(R"({"scenario":{"parties":1,"inputs":[1],"outputs":[2]},"p":[0.5,0.5]})");
    EXPECT_THROW(behavior_from_json(floats), ParseError);
    const Json short_p = Json::parse(R"({"scenario":{"parties":1,"inputs":[1],"outputs":[2]},"p":["1"]})");
    EXPECT_THROW(behavior_from_json(short_p), StructuralError);
    const Json missing = Json::parse(R"({"p":["1","0"]})");
    EXPECT_THROW(behavior_from_json(missing), ParseError);
}
