#pragma once

// End-to-end automatic seeded region growing:
//   median filter -> Otsu -> ROI components -> interior candidates
//   -> features -> K-means seeds -> gated region growing.

#include "asrg/components.hpp"
#include "asrg/grow.hpp"
#include "asrg/image.hpp"
#include "asrg/median.hpp"
#include "asrg/seeds.hpp"
#include "asrg/threshold.hpp"

#include <chrono>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace asrg {

struct SegmentationConfig {
    int k = 4;
    int seed_mask_r = 3;
    int median_radius = 1;
    int grow_radius = 1;
    Connectivity connectivity = Connectivity::four;
    Polarity polarity = Polarity::bright_foreground;
    std::uint64_t min_area = 9;
    std::uint64_t rng_seed = 0;
    NeighborhoodRule neighborhood_rule = NeighborhoodRule::pixel_and_mean;
    FeatureWeights feature_weights;

    friend bool operator==(const SegmentationConfig&, const SegmentationConfig&) = default;
};

inline void validate(const SegmentationConfig& cfg) {
    if (cfg.k < 1) throw std::invalid_argument("k must be at least 1");
    if (cfg.seed_mask_r < 1 || cfg.seed_mask_r % 2 == 0) throw std::invalid_argument("seed-mask-r must be odd and positive");
    if (cfg.median_radius < 0) throw std::invalid_argument("median-radius must be non-negative");
    if (cfg.grow_radius < 0) throw std::invalid_argument("grow-radius must be non-negative");
    const auto& fw = cfg.feature_weights;
    if (!(fw.x >= 0 && fw.y >= 0 && fw.intensity >= 0)) throw std::invalid_argument("feature weights must be non-negative");
}

/// A stage failed for a reason tied to the input rather than a bug, such as
/// a scene with no foreground.
class PipelineError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct StageTiming {
    std::string stage;
    double milliseconds = 0.0;
};

struct SegmentationRun {
    GrayImage preprocessed;
    OtsuResult otsu;
    Components rois;
    std::vector<SeedCandidate> candidates;
    SeedSelection selection;
    GrowConfig grow_config;
    GrowResult grown;
    std::vector<std::string> warnings;
    std::vector<StageTiming> timings;
};

inline GrowConfig grow_config_for(const SegmentationConfig& cfg, int threshold) {
    return {threshold, cfg.polarity, cfg.grow_radius, cfg.connectivity, cfg.neighborhood_rule};
}

inline SegmentationRun segment(const GrayImage& input, const SegmentationConfig& cfg) {
    validate(cfg);
    SegmentationRun run;
    auto clock_start = std::chrono::steady_clock::now();
    auto lap = [&](const char* stage) {
        const auto now = std::chrono::steady_clock::now();
        run.timings.push_back({stage, std::chrono::duration<double, std::milli>(now - clock_start).count()});
        clock_start = now;
    };

    run.preprocessed = median_filter(input, cfg.median_radius);
    lap("median_filter");

    run.otsu = otsu_threshold(histogram(run.preprocessed));
    const BinaryMask mask = binarize(run.preprocessed, run.otsu.threshold, cfg.polarity);
    lap("otsu");

    const auto all = connected_components(mask, cfg.connectivity);
    run.rois = filter_small(all.rois, all.labels, cfg.min_area);
    lap("roi");
    if (run.rois.rois.empty()) {
        throw PipelineError("no ROI found: no foreground component of at least " + std::to_string(cfg.min_area) +
                            " pixels at Otsu threshold " + std::to_string(run.otsu.threshold));
    }

    run.candidates =
        interior_candidates(mask_from_labels(run.rois.labels), run.rois.labels, run.preprocessed, cfg.seed_mask_r);
    lap("candidates");
    if (run.candidates.empty()) {
        throw PipelineError("no seed candidates: no ROI contains a fully foreground " + std::to_string(cfg.seed_mask_r) +
                            "x" + std::to_string(cfg.seed_mask_r) + " window");
    }
    if (static_cast<std::size_t>(cfg.k) > run.candidates.size()) {
        throw PipelineError("K = " + std::to_string(cfg.k) + " exceeds the number of seed candidates (" +
                            std::to_string(run.candidates.size()) + "); lower --k or --seed-mask-r");
    }

    const auto feats = extract_features(run.candidates, run.preprocessed);
    run.selection = select_seeds(run.candidates, feats, run.rois.rois, cfg.k, cfg.rng_seed, cfg.feature_weights);
    for (const auto id : run.selection.seedless_rois) {
        run.warnings.push_back("ROI " + std::to_string(id) + " has no seed candidate and was left seedless");
    }
    lap("seed_selection");

    run.grow_config = grow_config_for(cfg, run.otsu.threshold);
    try {
        run.grown = grow_regions(run.preprocessed, run.selection.seeds, run.grow_config);
    } catch (const std::invalid_argument& e) {
        throw PipelineError(e.what());
    }
    lap("grow");
    return run;
}

}  // namespace asrg
