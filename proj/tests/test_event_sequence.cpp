#include <gtest/gtest.h>

#include "acnet/event_sequence.hpp"
#include "acnet/random.hpp"
#include "support.hpp"

using namespace acnet;

TEST(EncodeWindow, AllZeroIsZero) {
    const std::vector<std::uint8_t> v(20, 0);
    for (std::size_t t = 3; t <= v.size(); ++t) EXPECT_EQ(encode_window(v, 3, t), 0U);
}

TEST(EncodeWindow, HandCase) {
    // A(t-3), A(t-2), A(t-1) = 1, 0, 1 -> 1*1 + 0*2 + 1*4 = 5
    const std::vector<std::uint8_t> v{0, 1, 0, 1, 1};
    EXPECT_EQ(encode_window(v, 3, 4), 5U);
    EXPECT_EQ(encode_window(v, 1, 4), 1U);
}

TEST(EncodeWindow, RejectsOutOfRange) {
    const std::vector<std::uint8_t> v(10, 1);
    EXPECT_THROW(encode_window(v, 3, 2), std::out_of_range);
    EXPECT_THROW(encode_window(v, 3, 11), std::out_of_range);
    EXPECT_THROW(encode_window(v, 0, 5), std::out_of_range);
    EXPECT_THROW(encode_window(v, kMaxWindowDepth + 1, 5), std::out_of_range);
}

TEST(EncodeWindow, BijectionExhaustiveUpToEight) {
    for (int eta = 1; eta <= 8; ++eta) {
        for (std::uint32_t s = 0; s < (1U << eta); ++s) {
            const auto bits = decode_window(s, eta);
            ASSERT_EQ(bits.size(), static_cast<std::size_t>(eta));
            // Lay the tuple out in time order: bits[k-1] is A(t-k).
            std::vector<std::uint8_t> seq(static_cast<std::size_t>(eta));
            for (int k = 1; k <= eta; ++k) seq[static_cast<std::size_t>(eta - k)] = bits[static_cast<std::size_t>(k - 1)];
            ASSERT_EQ(encode_window(seq, eta, static_cast<std::size_t>(eta)), s) << "eta=" << eta;
        }
    }
}

TEST(EncodeWindow, RoundTripRandomDeepWindows) {
    Rng rng(1);
    for (int trial = 0; trial < 200; ++trial) {
        const int eta = 9 + static_cast<int>(rng.below(8));
        const auto seq = testing_support::random_bits(rng, 40, 0.5);
        const std::size_t t = static_cast<std::size_t>(eta) + rng.below(40 - static_cast<std::size_t>(eta) + 1);
        const auto bits = decode_window(encode_window(seq, eta, t), eta);
        for (int k = 1; k <= eta; ++k) ASSERT_EQ(bits[static_cast<std::size_t>(k - 1)], seq[t - static_cast<std::size_t>(k)]);
    }
}

TEST(Lag1, Cases) {
    const std::vector<std::uint8_t> ones(10, 1);
    for (std::size_t t = 1; t < 10; ++t) EXPECT_EQ(lag1(ones, t), 1);
    std::vector<std::uint8_t> impulse(10, 0);
    impulse[5] = 1;
    EXPECT_EQ(lag1(impulse, 6), 1);
    EXPECT_EQ(lag1(impulse, 5), 0);
    EXPECT_THROW(lag1(impulse, 0), std::out_of_range);
}

namespace {

SequenceBundle two_sequences(std::size_t T) {
    SequenceBundle b;
    b.grid = {10, T};
    b.situations.push_back({"C1", SequenceKind::Situation, std::vector<std::uint8_t>(T, 0)});
    b.emotions.push_back({"M1", SequenceKind::Emotion, std::vector<std::uint8_t>(T, 1)});
    return b;
}

}  // namespace

TEST(ValidateBundle, AcceptsWellFormed) { EXPECT_TRUE(validate_bundle(two_sequences(100)).ok()); }

TEST(ValidateBundle, NamesNonBinaryIndex) {
    auto b = two_sequences(100);
    b.situations[0].values[7] = 2;
    const auto r = validate_bundle(b);
    ASSERT_EQ(r.issues.size(), 1U);
    EXPECT_EQ(r.issues[0].index, 7U);
    EXPECT_NE(r.summary().find("index 7"), std::string::npos);
}

TEST(ValidateBundle, NamesBothLengths) {
    auto b = two_sequences(100);
    b.emotions[0].values.resize(99);
    const auto r = validate_bundle(b);
    ASSERT_FALSE(r.ok());
    EXPECT_NE(r.summary().find("99"), std::string::npos);
    EXPECT_NE(r.summary().find("100"), std::string::npos);
    EXPECT_THROW(require_valid(b), ValidationError);
}

TEST(ValidateBundle, RejectsDuplicateAndEmptyNames) {
    auto b = two_sequences(10);
    b.emotions[0].name = "C1";
    EXPECT_FALSE(validate_bundle(b).ok());
    b.emotions[0].name = "";
    EXPECT_FALSE(validate_bundle(b).ok());
}

TEST(ValidateBundle, RejectsKindMismatchAndBadGrid) {
    auto b = two_sequences(10);
    b.emotions[0].kind = SequenceKind::Situation;
    EXPECT_FALSE(validate_bundle(b).ok());
    auto c = two_sequences(1);
    EXPECT_FALSE(validate_bundle(c).ok());
    auto d = two_sequences(10);
    d.grid.step_minutes = 0;
    EXPECT_FALSE(validate_bundle(d).ok());
}

TEST(ValidateBundle, EmptyBundleIsValid) {
    SequenceBundle b;
    EXPECT_TRUE(validate_bundle(b).ok());
}
