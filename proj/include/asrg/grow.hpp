#pragma once

// Multi-seed region growing gated by a global threshold.
//
// A pixel may join a region only if it is on the foreground side of the
// threshold and, under the pixel_and_mean rule, the mean of its
// (2r + 1)^2 window (replicate-padded) is too. Thin bright structures such
// as one-pixel bridges between objects fail the window test, which stops a
// region from leaking into its neighbour.
//
// All regions share one best-first frontier keyed by
// |intensity - current region mean|, ties served first-in first-out. A
// pixel is claimed once and never reassigned.

#include "asrg/components.hpp"
#include "asrg/image.hpp"
#include "asrg/seeds.hpp"
#include "asrg/threshold.hpp"

#include <algorithm>
#include <cstdint>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

namespace asrg {

enum class NeighborhoodRule { pixel_only, pixel_and_mean };

struct GrowConfig {
    int threshold = 128;
    Polarity polarity = Polarity::bright_foreground;
    int grow_radius = 1;
    Connectivity connectivity = Connectivity::four;
    NeighborhoodRule rule = NeighborhoodRule::pixel_and_mean;
};

struct GrowResult {
    LabelMap labels;
    std::vector<std::uint64_t> region_sizes;
    std::uint64_t frontier_rejections = 0;

    friend bool operator==(const GrowResult&, const GrowResult&) = default;
};

namespace detail {

inline bool window_passes(std::int64_t sum, std::int64_t n, const GrowConfig& cfg) {
    const std::int64_t level = static_cast<std::int64_t>(cfg.threshold) * n;
    return cfg.polarity == Polarity::bright_foreground ? sum > level : sum <= level;
}

inline void check_config(const GrowConfig& cfg) {
    if (cfg.grow_radius < 0) throw std::invalid_argument("grow: radius must be non-negative");
    if (cfg.threshold < 0 || cfg.threshold > 255) throw std::invalid_argument("grow: threshold outside [0, 255]");
}

}  // namespace detail

inline bool accept(const GrayImage& img, int x, int y, const GrowConfig& cfg) {
    detail::check_config(cfg);
    if (!is_foreground(img(x, y), cfg.threshold, cfg.polarity)) return false;
    if (cfg.rule == NeighborhoodRule::pixel_only || cfg.grow_radius == 0) return true;
    const int r = cfg.grow_radius;
    std::int64_t sum = 0;
    for (int dy = -r; dy <= r; ++dy) {
        const int yy = std::clamp(y + dy, 0, img.height() - 1);
        for (int dx = -r; dx <= r; ++dx) sum += img(std::clamp(x + dx, 0, img.width() - 1), yy);
    }
    const std::int64_t n = static_cast<std::int64_t>(2 * r + 1) * (2 * r + 1);
    return detail::window_passes(sum, n, cfg);
}

/// accept() for every pixel at once, via a summed-area table over the
/// replicate-padded image.
inline BinaryMask acceptance_mask(const GrayImage& img, const GrowConfig& cfg) {
    detail::check_config(cfg);
    BinaryMask out = binarize(img, cfg.threshold, cfg.polarity);
    if (cfg.rule == NeighborhoodRule::pixel_only || cfg.grow_radius == 0) return out;

    const int r = cfg.grow_radius;
    const int w = img.width();
    const int h = img.height();
    const int pw = w + 2 * r;
    const int ph = h + 2 * r;
    std::vector<std::int64_t> sat(static_cast<std::size_t>(pw + 1) * static_cast<std::size_t>(ph + 1), 0);
    auto at = [&](int x, int y) -> std::int64_t& {
        return sat[static_cast<std::size_t>(y) * static_cast<std::size_t>(pw + 1) + static_cast<std::size_t>(x)];
    };
    for (int y = 0; y < ph; ++y) {
        const int sy = std::clamp(y - r, 0, h - 1);
        std::int64_t row = 0;
        for (int x = 0; x < pw; ++x) {
            row += img(std::clamp(x - r, 0, w - 1), sy);
            at(x + 1, y + 1) = at(x + 1, y) + row;
        }
    }
    const std::int64_t n = static_cast<std::int64_t>(2 * r + 1) * (2 * r + 1);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!out(x, y)) continue;
            // Window [x - r, x + r] in image space is [x, x + 2r] padded.
            const std::int64_t sum = at(x + 2 * r + 1, y + 2 * r + 1) - at(x, y + 2 * r + 1) -
                                     at(x + 2 * r + 1, y) + at(x, y);
            out(x, y) = detail::window_passes(sum, n, cfg) ? 1 : 0;
        }
    }
    return out;
}

inline GrowResult grow_regions(const GrayImage& img, const std::vector<Seed>& seeds, const GrowConfig& cfg) {
    const BinaryMask ok = acceptance_mask(img, cfg);
    const int w = img.width();

    GrowResult result{LabelMap(img.width(), img.height()), std::vector<std::uint64_t>(seeds.size(), 0), 0};
    std::vector<std::int64_t> sums(seeds.size(), 0);
    std::vector<std::uint8_t> rejected(img.size(), 0);

    struct Entry {
        std::uint64_t num;  // priority = num / den
        std::uint64_t den;
        std::uint64_t seq;
        std::uint32_t pixel;
        std::uint32_t region;
    };
    // Min-heap on (num / den, seq); fractions compared by cross-multiplication.
    auto later = [](const Entry& a, const Entry& b) {
        const auto lhs = static_cast<detail::u128>(a.num) * b.den;
        const auto rhs = static_cast<detail::u128>(b.num) * a.den;
        if (lhs != rhs) return lhs > rhs;
        return a.seq > b.seq;
    };
    std::priority_queue<Entry, std::vector<Entry>, decltype(later)> frontier(later);
    std::uint64_t seq = 0;

    const auto offsets = neighbor_offsets(cfg.connectivity);
    auto push_neighbors = [&](int x, int y, std::uint32_t region) {
        const auto count = static_cast<std::int64_t>(result.region_sizes[region]);
        for (const auto& d : offsets) {
            const int nx = x + d.x;
            const int ny = y + d.y;
            if (!img.contains(nx, ny)) continue;
            const auto ni = img.index(nx, ny);
            if (result.labels[ni] != 0 || rejected[ni]) continue;
            const std::int64_t diff = static_cast<std::int64_t>(img[ni]) * count - sums[region];
            frontier.push({static_cast<std::uint64_t>(diff < 0 ? -diff : diff), static_cast<std::uint64_t>(count), seq++,
                           static_cast<std::uint32_t>(ni), region});
        }
    };

    for (std::size_t s = 0; s < seeds.size(); ++s) {
        const auto& seed = seeds[s];
        if (!img.contains(seed.x, seed.y)) {
            throw std::invalid_argument("grow_regions: seed (" + std::to_string(seed.x) + ", " +
                                        std::to_string(seed.y) + ") lies outside the image");
        }
        const auto i = img.index(seed.x, seed.y);
        if (result.labels[i] != 0) {
            throw std::invalid_argument("grow_regions: duplicate seed at (" + std::to_string(seed.x) + ", " +
                                        std::to_string(seed.y) + ")");
        }
        if (!ok[i]) {
            throw std::invalid_argument("grow_regions: seed (" + std::to_string(seed.x) + ", " +
                                        std::to_string(seed.y) +
                                        ") fails the acceptance rule; threshold or grow radius is inconsistent "
                                        "with the seed mask");
        }
        result.labels[i] = static_cast<std::uint32_t>(s + 1);
        result.region_sizes[s] = 1;
        sums[s] = img[i];
    }
    for (std::size_t s = 0; s < seeds.size(); ++s) push_neighbors(seeds[s].x, seeds[s].y, static_cast<std::uint32_t>(s));

    while (!frontier.empty()) {
        const Entry e = frontier.top();
        frontier.pop();
        if (result.labels[e.pixel] != 0 || rejected[e.pixel]) continue;
        if (!ok[e.pixel]) {
            rejected[e.pixel] = 1;
            ++result.frontier_rejections;
            continue;
        }
        result.labels[e.pixel] = e.region + 1;
        ++result.region_sizes[e.region];
        sums[e.region] += img[e.pixel];
        push_neighbors(static_cast<int>(e.pixel % static_cast<std::uint32_t>(w)),
                       static_cast<int>(e.pixel / static_cast<std::uint32_t>(w)), e.region);
    }
    return result;
}

}  // namespace asrg
