#include "asrg/threshold.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <random>

using namespace asrg;

namespace {

Histogram from_counts(const std::array<std::uint64_t, 256>& c) {
    Histogram h;
    h.counts = c;
    return h;
}

}  // namespace

TEST(Otsu, EqualSpikesTakeLowestThreshold) {
    Histogram h;
    h.counts[0] = 100;
    h.counts[255] = 100;
    const auto r = otsu_threshold(h);
    EXPECT_EQ(r.threshold, 0);
    EXPECT_DOUBLE_EQ(r.between_class_variance, 0.25 * 255.0 * 255.0);
}

TEST(Otsu, SingleLevel) {
    Histogram h;
    h.counts[42] = 17;
    const auto r = otsu_threshold(h);
    EXPECT_EQ(r.threshold, 42);
    EXPECT_EQ(r.between_class_variance, 0.0);
}

TEST(Otsu, TwoClusterExample) {
    Histogram h;
    h.counts[10] = 50;
    h.counts[200] = 30;
    const auto want = oracle::otsu_exhaustive(h.counts);
    const auto r = otsu_threshold(h);
    EXPECT_EQ(r.threshold, want.threshold);
    EXPECT_EQ(r.threshold, 10);
    EXPECT_NEAR(r.between_class_variance, static_cast<double>(want.variance), 1e-9);
}

TEST(Otsu, EmptyHistogramThrows) { EXPECT_THROW(otsu_threshold(Histogram{}), std::invalid_argument); }

TEST(Otsu, MatchesExhaustiveScan) {
    std::mt19937 rng(7);
    std::uniform_int_distribution<std::uint64_t> count(0, 400);
    std::bernoulli_distribution occupied(0.3);
    for (int i = 0; i < 300; ++i) {
        std::array<std::uint64_t, 256> c{};
        for (auto& v : c) v = occupied(rng) ? count(rng) : 0;
        c[static_cast<std::size_t>(i % 256)] += 1;
        ASSERT_EQ(otsu_threshold(from_counts(c)).threshold, oracle::otsu_exhaustive(c).threshold) << i;
    }
}

TEST(Otsu, InvariantUnderPixelShuffle) {
    std::mt19937 rng(9);
    auto img = oracle::random_image(rng, 40, 30);
    const auto before = otsu_threshold(histogram(img));
    std::shuffle(img.pixels().begin(), img.pixels().end(), rng);
    const auto after = otsu_threshold(histogram(img));
    EXPECT_EQ(before.threshold, after.threshold);
    EXPECT_EQ(before.between_class_variance, after.between_class_variance);
}

TEST(Otsu, LargeCountsStayExact) {
    Histogram h;
    h.counts[20] = 100'000'000;
    h.counts[21] = 1;
    h.counts[220] = 100'000'000;
    EXPECT_EQ(otsu_threshold(h).threshold, oracle::otsu_exhaustive(h.counts).threshold);
}

TEST(Binarize, BoundarySemantics) {
    const GrayImage img(2, 1, std::vector<std::uint8_t>{0, 255});
    EXPECT_EQ(binarize(img, 0, Polarity::bright_foreground), BinaryMask(2, 1, std::vector<std::uint8_t>{0, 1}));
    EXPECT_EQ(binarize(img, 0, Polarity::dark_foreground), BinaryMask(2, 1, std::vector<std::uint8_t>{1, 0}));
}

TEST(Binarize, PolaritiesAreComplementary) {
    std::mt19937 rng(10);
    const auto img = oracle::random_image(rng, 23, 19);
    for (int t : {0, 64, 127, 200, 255}) {
        const auto b = binarize(img, t, Polarity::bright_foreground);
        const auto d = binarize(img, t, Polarity::dark_foreground);
        for (std::size_t i = 0; i < img.size(); ++i) {
            ASSERT_EQ(b[i] + d[i], 1);
            ASSERT_EQ(b[i] == 1, img[i] > t);
        }
    }
}
