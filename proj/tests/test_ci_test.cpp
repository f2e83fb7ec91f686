#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "acnet/ci_test.hpp"
#include "support.hpp"

using namespace acnet;
using testing_support::Counts;

namespace {

ContingencyTable3D diagonal_table() {
    ContingencyTable3D t(2, 2, 1);
    t.add(0, 0, 0, 5);
    t.add(1, 1, 0, 5);
    return t;
}

}  // namespace

TEST(BuildContingency, AllZeroTriplets) {
    const std::vector<std::uint8_t> a(10, 0), b(10, 0);
    const std::vector<std::uint32_t> k(10, 0);
    const auto t = build_contingency(a, b, k, 1);
    EXPECT_EQ(t(0, 0, 0), 10U);
    EXPECT_EQ(t.total(), 10U);
}

TEST(BuildContingency, AlternatingTriplets) {
    std::vector<std::uint8_t> a, b;
    for (int i = 0; i < 5; ++i) {
        a.insert(a.end(), {0, 1});
        b.insert(b.end(), {0, 1});
    }
    const std::vector<std::uint32_t> k(10, 0);
    const auto t = build_contingency(a, b, k, 1);
    EXPECT_EQ(t(0, 0, 0), 5U);
    EXPECT_EQ(t(1, 1, 0), 5U);
    EXPECT_EQ(t(0, 1, 0) + t(1, 0, 0), 0U);
}

TEST(BuildContingency, RejectsEmptyAndRagged) {
    const std::vector<std::uint8_t> e;
    const std::vector<std::uint32_t> ek;
    EXPECT_THROW(build_contingency(e, e, ek, 1), std::invalid_argument);
    const std::vector<std::uint8_t> a(3, 0), b(4, 0);
    const std::vector<std::uint32_t> k(3, 0);
    EXPECT_THROW(build_contingency(a, b, k, 1), std::invalid_argument);
    const std::vector<std::uint32_t> bad(3, 7);
    EXPECT_THROW(build_contingency(a, a, bad, 2), std::out_of_range);
}

TEST(ExpectedCounts, DiagonalTable) {
    const auto e = expected_counts(diagonal_table());
    for (double v : e) EXPECT_DOUBLE_EQ(v, 2.5);
}

TEST(ExpectedCounts, UniformTableAndEmptySlice) {
    ContingencyTable3D t(2, 2, 2);
    for (std::size_t o = 0; o < 2; ++o)
        for (std::size_t p = 0; p < 2; ++p) t.add(o, p, 0, 4);
    const auto e = expected_counts(t);
    for (std::size_t o = 0; o < 2; ++o)
        for (std::size_t p = 0; p < 2; ++p) {
            EXPECT_DOUBLE_EQ(e[(o * 2 + p) * 2 + 0], 4.0);
            EXPECT_DOUBLE_EQ(e[(o * 2 + p) * 2 + 1], 0.0);
        }
}

TEST(G2Statistic, HandValue) { EXPECT_NEAR(g2_statistic(diagonal_table()), 20.0 * std::log(2.0), 1e-12); }

TEST(G2Statistic, ZeroWhenObservedEqualsExpected) {
    ContingencyTable3D t(2, 2, 1);
    t.add(0, 0, 0, 4);
    t.add(0, 1, 0, 4);
    t.add(1, 0, 0, 4);
    t.add(1, 1, 0, 4);
    EXPECT_EQ(g2_statistic(t), 0.0);
}

TEST(G2Statistic, MatchesLoopLiteralOracle) {
    Rng rng(2024);
    for (int trial = 0; trial < 1000; ++trial) {
        const Counts c = testing_support::random_counts(rng, 2, 2, 8, 50);
        ASSERT_NEAR(g2_statistic(testing_support::to_table(c)), testing_support::oracle_g2(c), 1e-10);
    }
}

TEST(G2Statistic, NonNegativeOnWiderTables) {
    Rng rng(7);
    for (int trial = 0; trial < 500; ++trial) {
        const Counts c = testing_support::random_counts(rng, 4, 4, 6, 30, 0.4);
        const double g2 = g2_statistic(testing_support::to_table(c));
        ASSERT_GE(g2, 0.0);
        ASSERT_NEAR(g2, std::max(0.0, testing_support::oracle_g2(c)), 1e-9);
    }
}

TEST(G2Statistic, InvariantUnderSlicePermutation) {
    Rng rng(99);
    for (int trial = 0; trial < 300; ++trial) {
        Counts c = testing_support::random_counts(rng, 2, 2, 8, 50);
        const std::size_t S = c[0][0].size();
        std::vector<std::size_t> perm(S);
        std::iota(perm.begin(), perm.end(), 0);
        rng.shuffle(perm);
        Counts d = c;
        for (std::size_t o = 0; o < c.size(); ++o)
            for (std::size_t p = 0; p < c[o].size(); ++p)
                for (std::size_t q = 0; q < S; ++q) d[o][p][perm[q]] = c[o][p][q];
        const auto a = testing_support::to_table(c), b = testing_support::to_table(d);
        ASSERT_NEAR(g2_statistic(a), g2_statistic(b), 1e-9);
        ASSERT_EQ(degrees_of_freedom(a), degrees_of_freedom(b));
    }
}

TEST(DegreesOfFreedom, FullTableIsNominal) {
    ContingencyTable3D t(2, 2, 4);
    for (std::size_t q = 0; q < 4; ++q)
        for (std::size_t o = 0; o < 2; ++o)
            for (std::size_t p = 0; p < 2; ++p) t.add(o, p, q, 1 + o + p + q);
    EXPECT_EQ(degrees_of_freedom(t), 4);
    EXPECT_EQ(nominal_degrees_of_freedom(t), 4);
}

TEST(DegreesOfFreedom, EmptyMarginsRemoveContrasts) {
    // Diagonal slices keep both margins and hence their single contrast.
    EXPECT_EQ(degrees_of_freedom(diagonal_table()), 1);
    // A slice with one observed row has no contrast; an empty slice neither.
    ContingencyTable3D t(2, 2, 3);
    t.add(0, 0, 0, 3);
    t.add(0, 1, 0, 2);
    t.add(0, 0, 1, 1);
    t.add(1, 0, 1, 1);
    t.add(0, 1, 1, 1);
    t.add(1, 1, 1, 1);
    EXPECT_EQ(degrees_of_freedom(t), 1);
    EXPECT_EQ(nominal_degrees_of_freedom(t), 3);
}

TEST(DegreesOfFreedom, NeverExceedsNominalOnRandomTables) {
    Rng rng(5);
    for (int trial = 0; trial < 500; ++trial) {
        const auto t = testing_support::to_table(testing_support::random_counts(rng, 3, 3, 8, 5, 0.5));
        const int df = degrees_of_freedom(t);
        ASSERT_GE(df, 0);
        ASSERT_LE(df, nominal_degrees_of_freedom(t));
    }
}

TEST(CiTest, IdenticalSequencesAreDependent) {
    Rng rng(1);
    const auto a = testing_support::random_bits(rng, 2000, 0.5);
    const std::vector<std::uint32_t> k(a.size(), 0);
    const auto v = ci_test(a, a, k, 1, 0.05);
    EXPECT_FALSE(v.independent);
    EXPECT_EQ(v.df, 1);
}

TEST(CiTest, EmptyContrastIsIndependent) {
    ContingencyTable3D t(2, 2, 1);
    t.add(0, 0, 0, 10);
    t.add(0, 1, 0, 10);
    const auto v = ci_test(t, 0.05);
    EXPECT_EQ(v.df, 0);
    EXPECT_TRUE(v.independent);
    EXPECT_EQ(v.p_value, 1.0);
}

TEST(CiTest, RejectsBadAlpha) {
    EXPECT_THROW(ci_test(diagonal_table(), 0.0), std::invalid_argument);
    EXPECT_THROW(ci_test(diagonal_table(), 1.0), std::invalid_argument);
}

TEST(CiTest, SizeIsCalibrated) {
    // 500 seeds of independent fair coins, N = 2000.
    int rejected = 0, accepted = 0;
    for (std::uint64_t seed = 0; seed < 500; ++seed) {
        Rng rng(derive_seed(31, {seed}));
        const auto a = testing_support::random_bits(rng, 2000, 0.5);
        const auto b = testing_support::random_bits(rng, 2000, 0.5);
        std::vector<std::uint32_t> k(2000);
        for (auto& s : k) s = static_cast<std::uint32_t>(rng.below(4));
        const auto v = ci_test(a, b, k, 4, 0.05);
        (v.independent ? accepted : rejected) += 1;
    }
    const double rate = rejected / 500.0;
    EXPECT_GE(rate, 0.02);
    EXPECT_LE(rate, 0.09);
    EXPECT_GE(accepted, 450);
}
