#include "asrg/image.hpp"
#include "asrg/io.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <string>

using namespace asrg;
namespace fs = std::filesystem;

namespace {

// Written by Pillow with optimize=True (rows use Sub and Up filters).
const std::vector<std::uint8_t> kPillowPng = {137,80,78,71,13,10,26,10,0,0,0,13,73,72,68,82,0,0,0,12,0,0,0,6,8,0,0,0,0,210,133,32,93,0,0,0,71,73,68,65,84,120,218,5,193,9,14,128,32,12,4,64,122,209,110,145,0,49,162,137,255,255,166,113,134,48,174,251,120,231,218,231,179,153,144,101,138,102,75,173,92,153,134,55,84,146,80,246,128,80,132,103,15,229,108,166,81,128,158,50,217,25,233,221,205,12,223,15,118,136,3,145,65,66,99,52,0,0,0,0,73,69,78,68,174,66,96,130};
const std::vector<std::uint8_t> kPillowPixels = {9,24,45,68,80,107,123,140,162,181,205,227,10,33,55,68,96,110,127,150,173,191,209,233,16,35,56,83,103,121,136,156,174,194,217,237,23,43,65,86,104,129,144,163,184,207,225,241,33,54,70,90,112,129,153,172,197,217,228,1,40,56,79,100,119,142,160,177,202,222,237,255};

// 7x6 gray image whose rows use filters None, Sub, Up, Average, Paeth, Average.
const std::vector<std::uint8_t> kAllFiltersPng = {137,80,78,71,13,10,26,10,0,0,0,13,73,72,68,82,0,0,0,7,0,0,0,6,8,0,0,0,0,42,101,219,170,0,0,0,59,73,68,65,84,120,156,1,48,0,207,255,0,237,191,136,70,95,3,173,1,237,60,130,105,174,148,145,2,235,39,171,101,88,226,92,3,180,140,167,63,17,34,125,4,12,196,55,54,250,31,63,3,80,139,156,78,108,68,191,250,132,19,213,83,7,213,114,0,0,0,0,73,69,78,68,174,66,96,130};
const std::vector<std::uint8_t> kAllFiltersPixels = {237,191,136,70,95,3,173,237,41,171,20,194,86,231,216,80,86,121,26,56,67,32,196,52,149,104,114,215,44,136,107,203,143,174,22,102,2,210,28,193,251,71};

const std::vector<std::uint8_t> kRgbPng = {137,80,78,71,13,10,26,10,0,0,0,13,73,72,68,82,0,0,0,2,0,0,0,2,8,2,0,0,0,253,212,154,115,0,0,0,22,73,68,65,84,120,156,99,228,18,145,99,96,96,96,98,96,96,96,96,96,0,0,2,230,0,64,92,165,32,91,0,0,0,0,73,69,78,68,174,66,96,130};
// 2x2 16-bit gray: 0, 1000, 65535, 7.
const std::vector<std::uint8_t> kGray16Png = {137,80,78,71,13,10,26,10,0,0,0,13,73,72,68,82,0,0,0,2,0,0,0,2,16,0,0,0,0,7,77,142,187,0,0,0,18,73,68,65,84,120,156,99,96,96,96,126,193,240,255,63,3,59,0,12,143,2,241,84,24,63,251,0,0,0,0,73,69,78,68,174,66,96,130};

std::vector<std::uint8_t> bytes_of(const std::string& s) { return {s.begin(), s.end()}; }

class TempDir : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("asrg_raster_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }
    fs::path dir_;
};

}  // namespace

TEST(Histogram, SingleLevel) {
    const auto h = histogram(GrayImage(2, 1, std::vector<std::uint8_t>{5, 5}));
    for (int v = 0; v < 256; ++v) EXPECT_EQ(h.counts[v], v == 5 ? 2u : 0u);
}

TEST(Histogram, DirectTally) {
    const auto h = histogram(GrayImage(2, 2, std::vector<std::uint8_t>{0, 0, 255, 7}));
    EXPECT_EQ(h.counts[0], 2u);
    EXPECT_EQ(h.counts[7], 1u);
    EXPECT_EQ(h.counts[255], 1u);
    EXPECT_EQ(h.total(), 4u);
}

TEST(Histogram, RandomImageMatchesTally) {
    std::mt19937 rng(11);
    const auto img = oracle::random_image(rng, 32, 32);
    const auto h = histogram(img);
    EXPECT_EQ(h.total(), 1024u);
    for (int v = 0; v < 256; ++v) {
        std::uint64_t n = 0;
        for (auto p : img.pixels()) n += p == v;
        EXPECT_EQ(h.counts[v], n);
    }
}

TEST(Raster, RejectsWrongBufferLength) {
    EXPECT_THROW(GrayImage(2, 2, std::vector<std::uint8_t>{1, 2, 3}), std::invalid_argument);
}

TEST(Pgm, LoadsTwoByTwo) {
    auto bytes = bytes_of("P5\n2 2\n255\n");
    for (std::uint8_t v : {0, 255, 128, 7}) bytes.push_back(v);
    const auto img = decode_gray(bytes);
    EXPECT_EQ(img, GrayImage(2, 2, std::vector<std::uint8_t>{0, 255, 128, 7}));
}

TEST(Pgm, HeaderComments) {
    auto bytes = bytes_of("P5 # comment\n2 # w\n1\n255\n");
    bytes.push_back(3);
    bytes.push_back(4);
    EXPECT_EQ(decode_gray(bytes), GrayImage(2, 1, std::vector<std::uint8_t>{3, 4}));
}

TEST(Pgm, ShortDataIsDimensionMismatch) {
    auto bytes = bytes_of("P5\n2 2\n255\n");
    for (std::uint8_t v : {1, 2, 3}) bytes.push_back(v);
    try {
        decode_gray(bytes);
        FAIL() << "expected an error";
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("dimension mismatch"), std::string::npos) << e.what();
    }
}

TEST(Pgm, RejectsSixteenBit) {
    auto bytes = bytes_of("P5\n1 1\n65535\n");
    bytes.push_back(0);
    bytes.push_back(1);
    EXPECT_THROW(decode_gray(bytes), FormatError);
}

TEST(Pgm, EncodeRoundTrip) {
    std::mt19937 rng(3);
    const auto img = oracle::random_image(rng, 13, 5);
    EXPECT_EQ(decode_gray(pgm::encode(img)), img);
}

TEST(Png, DecodesForeignEncoder) {
    EXPECT_EQ(decode_gray(kPillowPng), GrayImage(12, 6, kPillowPixels));
}

TEST(Png, DecodesEveryFilterType) {
    EXPECT_EQ(decode_gray(kAllFiltersPng), GrayImage(7, 6, kAllFiltersPixels));
}

TEST(Png, GrayRoundTrip) {
    std::mt19937 rng(5);
    const auto img = oracle::random_image(rng, 31, 17);
    EXPECT_EQ(decode_gray(encode_gray_png(img)), img);
}

TEST(Png, RejectsSixteenBitGray) {
    try {
        decode_gray(kGray16Png);
        FAIL() << "expected an error";
    } catch (const FormatError& e) {
        EXPECT_NE(std::string(e.what()).find("unsupported bit depth"), std::string::npos) << e.what();
    }
}

TEST(Png, RejectsRgb) { EXPECT_THROW(decode_gray(kRgbPng), FormatError); }

TEST(Png, RejectsCorruptCrc) {
    auto bytes = kAllFiltersPng;
    bytes[40] ^= 0xff;
    EXPECT_THROW(decode_gray(bytes), FormatError);
}

TEST(Png, RejectsTruncated) {
    const std::vector<std::uint8_t> cut(kAllFiltersPng.begin(), kAllFiltersPng.end() - 12);
    EXPECT_THROW(decode_gray(cut), FormatError);
}

TEST(Png, RejectsUnknownFormat) { EXPECT_THROW(decode_gray(bytes_of("GIF89a")), FormatError); }

TEST(LabelPng, SixteenBitGrayLoadsAsLabels) {
    const auto l = decode_labels(kGray16Png);
    EXPECT_EQ(l, LabelMap(2, 2, std::vector<std::uint32_t>{0, 1000, 65535, 7}));
}

TEST_F(TempDir, LabelPngSinglePixel) {
    const auto p = dir_ / "one.png";
    save_label_png(LabelMap(1, 1, std::vector<std::uint32_t>{0}), p);
    const auto back = load_labels(p);
    EXPECT_EQ(back, LabelMap(1, 1, std::vector<std::uint32_t>{0}));
}

TEST_F(TempDir, LabelPngThreeRegions) {
    LabelMap m(8, 8);
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 8; ++x) m(x, y) = x < 3 ? 1 : (y < 4 ? 2 : 3);
    }
    const auto p = dir_ / "three.png";
    save_label_png(m, p);
    const auto bytes = read_file(p);
    EXPECT_EQ(png::decode(bytes).color_type, png::ColorType::palette);
    EXPECT_EQ(load_labels(p), m);
}

TEST_F(TempDir, LabelPngThreeHundredRegionsIsSixteenBit) {
    LabelMap m(20, 15);
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = static_cast<std::uint32_t>(i + 1);
    const auto p = dir_ / "many.png";
    save_label_png(m, p);
    const auto d = png::decode(read_file(p));
    EXPECT_EQ(d.bit_depth, 16);
    EXPECT_EQ(d.color_type, png::ColorType::gray);
    for (std::size_t i = 0; i < m.size(); ++i) ASSERT_EQ(d.samples[i], m[i]);
    EXPECT_EQ(load_labels(p), m);
}

TEST(LabelPng, TooManyRegionsThrows) {
    LabelMap m(1, 1, std::vector<std::uint32_t>{70000});
    EXPECT_THROW(encode_label_png(m), std::invalid_argument);
}

TEST_F(TempDir, SaveGrayPicksFormatByExtension) {
    std::mt19937 rng(8);
    const auto img = oracle::random_image(rng, 9, 4);
    save_gray(img, dir_ / "a.pgm");
    save_gray(img, dir_ / "a.png");
    EXPECT_TRUE(pgm::has_magic(read_file(dir_ / "a.pgm")));
    EXPECT_TRUE(png::has_signature(read_file(dir_ / "a.png")));
    EXPECT_EQ(load_gray(dir_ / "a.pgm"), img);
    EXPECT_EQ(load_gray(dir_ / "a.png"), img);
}

TEST(Io, MissingFileThrows) { EXPECT_THROW(load_gray("/nonexistent/none.pgm"), IoError); }

TEST(Labels, ContiguityAndSizes) {
    const LabelMap m(3, 1, std::vector<std::uint32_t>{2, 0, 2});
    EXPECT_FALSE(has_contiguous_labels(m));
    const LabelMap n(3, 1, std::vector<std::uint32_t>{1, 2, 2});
    EXPECT_TRUE(has_contiguous_labels(n));
    EXPECT_EQ(max_label(n), 2u);
    EXPECT_EQ(label_sizes(n), (std::vector<std::uint64_t>{0, 1, 2}));
}
