#pragma once

// Automatic seed selection.
//
//  1. Interior filter: a foreground pixel is a candidate only if its whole
//     R x R window lies inside the image and contains no background, which
//     removes ROI boundary pixels and isolated outliers.
//  2. Every candidate becomes a feature (x, y, intensity), each axis scaled
//     to [0, 1].
//  3. K-means over all candidates; each centroid is snapped to the candidate
//     with the nearest feature, so seeds are always real interior pixels.
//  4. Coverage pass: an ROI left without a seed gets a fallback seed, its
//     candidate closest to the ROI centroid in image space.

#include "asrg/components.hpp"
#include "asrg/image.hpp"
#include "asrg/kmeans.hpp"

#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace asrg {

struct SeedCandidate {
    int x = 0;
    int y = 0;
    std::uint8_t intensity = 0;
    std::uint32_t roi_id = 0;

    friend bool operator==(const SeedCandidate&, const SeedCandidate&) = default;
};

struct Seed {
    int x = 0;
    int y = 0;
    std::uint8_t intensity = 0;
    std::uint32_t roi_id = 0;
    int cluster_id = 0;
    bool fallback = false;

    friend bool operator==(const Seed&, const Seed&) = default;
};

struct FeatureWeights {
    double x = 1.0;
    double y = 1.0;
    double intensity = 1.0;

    friend bool operator==(const FeatureWeights&, const FeatureWeights&) = default;
};

struct SeedSelection {
    std::vector<Seed> seeds;
    /// ROIs that had no candidate at all and therefore no seed.
    std::vector<std::uint32_t> seedless_rois;
    KMeansModel model;
};

/// Raster-ordered foreground pixels whose full R x R window (radius R / 2)
/// is inside the image and entirely foreground.
inline std::vector<SeedCandidate> interior_candidates(const BinaryMask& mask, const LabelMap& labels,
                                                      const GrayImage& img, int R) {
    if (R < 1 || R % 2 == 0) throw std::invalid_argument("interior_candidates: R must be odd and positive");
    require_same_shape(mask, labels, "interior_candidates");
    require_same_shape(mask, img, "interior_candidates");

    const int w = mask.width();
    const int h = mask.height();
    const int half = R / 2;
    // Summed-area table of the mask, (w + 1) x (h + 1).
    std::vector<std::uint32_t> sat(static_cast<std::size_t>(w + 1) * static_cast<std::size_t>(h + 1), 0);
    auto at = [&](int x, int y) -> std::uint32_t& {
        return sat[static_cast<std::size_t>(y) * static_cast<std::size_t>(w + 1) + static_cast<std::size_t>(x)];
    };
    for (int y = 0; y < h; ++y) {
        std::uint32_t row = 0;
        for (int x = 0; x < w; ++x) {
            row += mask(x, y) ? 1u : 0u;
            at(x + 1, y + 1) = at(x + 1, y) + row;
        }
    }

    const auto full = static_cast<std::uint32_t>(R * R);
    std::vector<SeedCandidate> out;
    for (int y = half; y < h - half; ++y) {
        for (int x = half; x < w - half; ++x) {
            if (!mask(x, y)) continue;
            const std::uint32_t inside = at(x + half + 1, y + half + 1) - at(x - half, y + half + 1) -
                                         at(x + half + 1, y - half) + at(x - half, y - half);
            if (inside != full) continue;
            const auto roi = labels(x, y);
            if (roi == 0) throw std::invalid_argument("interior_candidates: foreground pixel without an ROI label");
            out.push_back({x, y, img(x, y), roi});
        }
    }
    return out;
}

/// fx = x / (width - 1), fy = y / (height - 1), fi = intensity / 255. A
/// degenerate axis (width or height 1) maps to 0.
inline std::vector<FeatureVector> extract_features(const std::vector<SeedCandidate>& cands, const GrayImage& img) {
    if (cands.empty()) throw std::invalid_argument("extract_features: empty candidate list");
    const double sx = img.width() > 1 ? 1.0 / (img.width() - 1) : 0.0;
    const double sy = img.height() > 1 ? 1.0 / (img.height() - 1) : 0.0;
    std::vector<FeatureVector> feats;
    feats.reserve(cands.size());
    for (const auto& c : cands) feats.push_back({c.x * sx, c.y * sy, c.intensity / 255.0});
    return feats;
}

inline SeedSelection select_seeds(const std::vector<SeedCandidate>& cands, const std::vector<FeatureVector>& feats,
                                  const std::vector<Roi>& rois, int k, std::uint64_t rng_seed,
                                  FeatureWeights weights = {}) {
    if (k < 1) throw std::invalid_argument("select_seeds: K must be at least 1");
    if (cands.empty()) throw std::invalid_argument("select_seeds: no seed candidates");
    if (cands.size() != feats.size()) throw std::invalid_argument("select_seeds: candidate/feature count mismatch");
    if (static_cast<std::size_t>(k) > cands.size()) {
        throw std::invalid_argument("K = " + std::to_string(k) + " exceeds the number of seed candidates (" +
                                    std::to_string(cands.size()) + "); lower --k or --seed-mask-r");
    }

    std::vector<FeatureVector> points;
    points.reserve(feats.size());
    for (const auto& f : feats) points.push_back({f.fx * weights.x, f.fy * weights.y, f.fi * weights.intensity});

    SeedSelection sel;
    sel.model = kmeans(points, k, rng_seed);

    std::vector<bool> used(cands.size(), false);
    for (std::size_t j = 0; j < sel.model.centroids.size(); ++j) {
        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < points.size(); ++i) {
            const double d = squared_distance(points[i], sel.model.centroids[j]);
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        if (used[best]) continue;
        used[best] = true;
        const auto& c = cands[best];
        sel.seeds.push_back({c.x, c.y, c.intensity, c.roi_id, static_cast<int>(j), false});
    }

    std::vector<bool> covered;
    for (const auto& s : sel.seeds) {
        if (covered.size() <= s.roi_id) covered.resize(s.roi_id + 1, false);
        covered[s.roi_id] = true;
    }
    for (const auto& roi : rois) {
        if (roi.id < covered.size() && covered[roi.id]) continue;
        std::size_t best = cands.size();
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < cands.size(); ++i) {
            if (cands[i].roi_id != roi.id) continue;
            const double dx = cands[i].x - roi.centroid_x;
            const double dy = cands[i].y - roi.centroid_y;
            const double d = dx * dx + dy * dy;
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        if (best == cands.size()) {
            sel.seedless_rois.push_back(roi.id);
            continue;
        }
        const auto& c = cands[best];
        sel.seeds.push_back({c.x, c.y, c.intensity, c.roi_id, assign(sel.model, points[best]), true});
    }
    return sel;
}

}  // namespace asrg
