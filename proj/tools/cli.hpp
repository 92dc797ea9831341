#pragma once

// Command implementations behind the `asrg` executable. Kept separate from
// main() so the tests can drive them in-process.

#include "asrg/asrg.hpp"

#include <json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace asrg::cli {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

enum ExitCode : int { kOk = 0, kFailure = 1, kUsage = 2 };

Json config_to_json(const SegmentationConfig& cfg);
/// Accepts either a bare config object or a run report carrying "config".
SegmentationConfig config_from_json(const Json& j);

Json run_report(const std::string& input, const SegmentationConfig& cfg, const SegmentationRun& run,
                bool include_timings);
Json eval_report_to_json(const EvalReport& report);

SceneSpec scene_from_json(const Json& j);
Json scene_to_json(const SceneSpec& spec);
/// Parses "cx,cy,radius,intensity".
BlobSpec parse_blob(const std::string& text);

/// Input image with every seed pixel painted 0 (bright foreground) or 255
/// (dark foreground).
GrayImage seed_overlay(const GrayImage& input, const std::vector<Seed>& seeds, Polarity polarity);

struct SegmentOptions {
    std::filesystem::path input;
    std::string output_prefix;
    SegmentationConfig config;
    bool timings = false;
    int jobs = 1;
};

struct SynthOptions {
    std::optional<std::filesystem::path> spec_path;
    SceneSpec scene;
    std::string output_prefix;
};

int cmd_segment(const SegmentOptions& opts, std::ostream& out, std::ostream& err);
int cmd_synth(const SynthOptions& opts, std::ostream& out, std::ostream& err);
int cmd_eval(const std::filesystem::path& pred, const std::filesystem::path& gt, const std::filesystem::path& report,
             std::ostream& out, std::ostream& err);
int cmd_otsu(const std::filesystem::path& input, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches to a subcommand.
int run(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace asrg::cli
