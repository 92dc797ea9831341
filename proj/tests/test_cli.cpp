#include "cli.hpp"
#include "oracles.hpp"
#include "scenes.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>
#include <string>
#include <vector>

using namespace asrg;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        dir_ = fs::temp_directory_path() /
               ("asrg_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    int run(std::vector<std::string> args) {
        args.insert(args.begin(), "asrg");
        std::vector<char*> argv;
        for (auto& a : args) argv.push_back(a.data());
        out_.str("");
        err_.str("");
        return cli::run(static_cast<int>(argv.size()), argv.data(), out_, err_);
    }

    std::string p(const std::string& name) const { return (dir_ / name).string(); }

    fs::path dir_;
    std::ostringstream out_, err_;
};

cli::Json load_json(const std::string& path) {
    const auto b = read_file(path);
    return cli::Json::parse(b.begin(), b.end());
}

}  // namespace

TEST_F(Cli, SynthSegmentEvalHappyPath) {
    ASSERT_EQ(run({"synth", "-o", p("s"), "--width", "128", "--height", "96", "--bg", "40", "--sigma", "10", "--rng-seed",
                   "7", "--blob", "30,30,12,180", "--blob", "90,40,14,170", "--blob", "60,75,10,190"}),
              0)
        << err_.str();
    for (const char* f : {"s.image.png", "s.gt.png", "s.scene.json"}) EXPECT_TRUE(fs::exists(p(f)));

    ASSERT_EQ(run({"segment", p("s.image.png"), "-o", p("r"), "--k", "3"}), 0) << err_.str();
    for (const char* f : {"r.labels.png", "r.seeds.png", "r.report.json"}) EXPECT_TRUE(fs::exists(p(f)));
    const auto report = load_json(p("r.report.json"));
    EXPECT_EQ(report["region_count"], 3);
    EXPECT_EQ(report["config"]["k"], 3);
    EXPECT_EQ(report["growth_order"], "best_first_fifo");
    EXPECT_FALSE(report.contains("timings_ms"));

    ASSERT_EQ(run({"eval", p("r.labels.png"), p("s.gt.png"), "-o", p("e.json")}), 0) << err_.str();
    const auto ev = load_json(p("e.json"));
    EXPECT_GE(ev["mean_dice"].get<double>(), 0.9);
    EXPECT_EQ(ev["n_gt_regions"], 3);
}

TEST_F(Cli, RerunsAreByteIdentical) {
    const std::vector<std::string> synth{"synth", "-o", p("s"), "--sigma", "10", "--rng-seed", "7", "--blob", "60,60,20,200",
                                         "--blob", "180,180,25,190", "--blob", "60,190,15,210"};
    std::vector<std::vector<std::uint8_t>> first;
    for (int rep = 0; rep < 2; ++rep) {
        ASSERT_EQ(run(synth), 0) << err_.str();
        ASSERT_EQ(run({"segment", p("s.image.png"), "-o", p("r"), "--k", "3"}), 0) << err_.str();
        std::vector<std::vector<std::uint8_t>> now;
        for (const char* f : {"s.image.png", "s.gt.png", "r.labels.png", "r.seeds.png", "r.report.json"}) {
            now.push_back(read_file(p(f)));
        }
        if (rep == 0) {
            first = now;
        } else {
            EXPECT_EQ(now, first);
        }
    }
}

TEST_F(Cli, TimingsOnlyOnRequest) {
    ASSERT_EQ(run({"synth", "-o", p("s"), "--blob", "100,100,30,200"}), 0);
    ASSERT_EQ(run({"segment", p("s.image.png"), "-o", p("r"), "--k", "1", "--timings"}), 0) << err_.str();
    EXPECT_TRUE(load_json(p("r.report.json")).contains("timings_ms"));
}

TEST_F(Cli, ConfigFromReportReproduces) {
    ASSERT_EQ(run({"synth", "-o", p("s"), "--sigma", "5", "--blob", "60,60,20,200", "--blob", "180,100,20,200"}), 0);
    ASSERT_EQ(run({"segment", p("s.image.png"), "-o", p("a"), "--k", "2", "--connectivity", "eight", "--grow-radius", "2"}),
              0);
    ASSERT_EQ(run({"segment", p("s.image.png"), "-o", p("b"), "--config", p("a.report.json")}), 0) << err_.str();
    EXPECT_EQ(read_file(p("a.labels.png")), read_file(p("b.labels.png")));
    EXPECT_EQ(load_json(p("a.report.json"))["config"], load_json(p("b.report.json"))["config"]);
}

TEST_F(Cli, ConstantImageHasNoRoi) {
    save_gray(GrayImage(32, 32, 90), p("flat.pgm"));
    EXPECT_NE(run({"segment", p("flat.pgm"), "-o", p("r")}), 0);
    EXPECT_NE(err_.str().find("no ROI found"), std::string::npos) << err_.str();
}

TEST_F(Cli, KAboveCandidates) {
    ASSERT_EQ(run({"synth", "-o", p("s"), "--width", "40", "--height", "40", "--blob", "20,20,4,200"}), 0);
    EXPECT_EQ(run({"segment", p("s.image.png"), "-o", p("r"), "--k", "500"}), 1);
    EXPECT_NE(err_.str().find("500"), std::string::npos);
}

TEST_F(Cli, BadArguments) {
    EXPECT_EQ(run({"segment", p("x.pgm"), "-o", p("r"), "--seed-mask-r", "4"}), 2);
    EXPECT_EQ(run({"segment", p("x.pgm"), "-o", p("r"), "--connectivity", "six"}), 2);
    EXPECT_NE(run({}), 0);
    EXPECT_NE(run({"bogus"}), 0);
}

TEST_F(Cli, MissingInput) {
    EXPECT_EQ(run({"segment", p("missing.pgm"), "-o", p("r")}), 1);
    EXPECT_EQ(run({"otsu", p("missing.pgm")}), 1);
}

TEST_F(Cli, SynthOverlapFails) {
    EXPECT_NE(run({"synth", "-o", p("s"), "--blob", "50,50,20,200", "--blob", "60,50,20,200"}), 0);
    EXPECT_FALSE(fs::exists(p("s.image.png")));
}

TEST_F(Cli, SynthZeroBlobsWarns) {
    EXPECT_EQ(run({"synth", "-o", p("s"), "--width", "8", "--height", "8", "--bg", "33"}), 0);
    EXPECT_NE(err_.str().find("warning"), std::string::npos);
    EXPECT_EQ(load_gray(p("s.image.png")), GrayImage(8, 8, 33));
}

TEST_F(Cli, SynthFromSpecFile) {
    const std::string spec = R"({"width": 64, "height": 64, "bg_intensity": 20, "noise_sigma": 4, "rng_seed": 3,
                                 "blobs": [{"x": 20, "y": 20, "radius": 8, "intensity": 200}]})";
    write_file(p("spec.json"), std::span(reinterpret_cast<const std::uint8_t*>(spec.data()), spec.size()));
    ASSERT_EQ(run({"synth", "--spec", p("spec.json"), "-o", p("s")}), 0) << err_.str();
    SceneSpec want;
    want.width = want.height = 64;
    want.bg_intensity = 20;
    want.noise_sigma = 4;
    want.rng_seed = 3;
    want.blobs = {{20, 20, 8, 200}};
    EXPECT_EQ(load_gray(p("s.image.png")), generate_blobs(want).image);
}

TEST_F(Cli, EvalIdentityAndMismatch) {
    LabelMap a(8, 8);
    for (int x = 0; x < 4; ++x) a(x, 2) = 1;
    save_label_png(a, p("a.png"));
    ASSERT_EQ(run({"eval", p("a.png"), p("a.png"), "-o", p("e.json")}), 0);
    EXPECT_EQ(load_json(p("e.json"))["mean_dice"].get<double>(), 1.0);
    save_label_png(LabelMap(9, 8), p("b.png"));
    EXPECT_NE(run({"eval", p("a.png"), p("b.png"), "-o", p("e2.json")}), 0);
}

TEST_F(Cli, EvalHalfOverlap) {
    LabelMap gt(8, 8), pred(8, 8);
    for (int y = 0; y < 8; ++y) {
        for (int x = 0; x < 4; ++x) gt(x, y) = 1;
        for (int x = 2; x < 6; ++x) pred(x, y) = 1;
    }
    save_label_png(gt, p("gt.png"));
    save_label_png(pred, p("pred.png"));
    ASSERT_EQ(run({"eval", p("pred.png"), p("gt.png"), "-o", p("e.json")}), 0);
    const auto t = oracle::tally(pred, 1, gt, 1);
    EXPECT_DOUBLE_EQ(load_json(p("e.json"))["matches"][0]["dice"].get<double>(), t.dice());
}

TEST_F(Cli, OtsuCommand) {
    save_gray(GrayImage(4, 4, 42), p("c.pgm"));
    ASSERT_EQ(run({"otsu", p("c.pgm")}), 0);
    EXPECT_NE(out_.str().find("threshold 42\n"), std::string::npos);
    EXPECT_NE(out_.str().find("between_class_variance 0\n"), std::string::npos);

    GrayImage bi(20, 10);
    std::mt19937 rng(61);
    std::normal_distribution<double> lo(60, 12), hi(190, 15);
    for (int y = 0; y < 10; ++y) {
        for (int x = 0; x < 20; ++x) bi(x, y) = static_cast<std::uint8_t>(std::clamp(x < 10 ? lo(rng) : hi(rng), 0.0, 255.0));
    }
    save_gray(bi, p("bi.png"));
    ASSERT_EQ(run({"otsu", p("bi.png")}), 0);
    const auto want = oracle::otsu_exhaustive(histogram(bi).counts);
    EXPECT_NE(out_.str().find("threshold " + std::to_string(want.threshold) + "\n"), std::string::npos) << out_.str();
}

TEST_F(Cli, BatchModeIsOrderedAndParallelSafe) {
    fs::create_directories(dir_ / "in");
    for (int i = 0; i < 4; ++i) {
        auto spec = fixture::blob_scene(2 + i % 3, 10, static_cast<std::uint64_t>(i));
        save_gray(generate_blobs(spec).image, dir_ / "in" / ("img" + std::to_string(i) + ".png"));
    }
    ASSERT_EQ(run({"segment", p("in"), "-o", p("out1"), "--k", "2", "--jobs", "1"}), 0) << err_.str();
    const std::string serial = out_.str();
    ASSERT_EQ(run({"segment", p("in"), "-o", p("out4"), "--k", "2", "--jobs", "4"}), 0) << err_.str();
    EXPECT_EQ(out_.str(), serial);
    for (int i = 0; i < 4; ++i) {
        const std::string stem = "img" + std::to_string(i);
        EXPECT_EQ(read_file(dir_ / "out1" / (stem + ".labels.png")), read_file(dir_ / "out4" / (stem + ".labels.png")));
    }
}

TEST(CliHelpers, ParseBlob) {
    const auto b = cli::parse_blob("3,4,5,6");
    EXPECT_EQ(b.cx, 3);
    EXPECT_EQ(b.intensity, 6);
    EXPECT_THROW(cli::parse_blob("3,4,5"), std::invalid_argument);
    EXPECT_THROW(cli::parse_blob("3,4,x,6"), std::invalid_argument);
}

TEST(CliHelpers, ConfigRoundTrip) {
    SegmentationConfig cfg;
    cfg.k = 7;
    cfg.connectivity = Connectivity::eight;
    cfg.polarity = Polarity::dark_foreground;
    cfg.neighborhood_rule = NeighborhoodRule::pixel_only;
    cfg.feature_weights = {1, 2, 0.5};
    cfg.rng_seed = 99;
    EXPECT_EQ(cli::config_from_json(cli::config_to_json(cfg)), cfg);
}

TEST(CliHelpers, SeedOverlayMarksSeeds) {
    const GrayImage img(4, 4, 200);
    const auto o = cli::seed_overlay(img, {Seed{1, 2, 200, 1, 0, false}}, Polarity::bright_foreground);
    EXPECT_EQ(o(1, 2), 0);
    EXPECT_EQ(o(0, 0), 200);
}
