#pragma once

#include "asrg/image.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace asrg {

/// Square-window median filter with replicate-edge padding.
///
/// Each row is swept with a running 256-bin histogram (Huang's method): one
/// column leaves and one enters per step, and the median index is nudged
/// instead of recomputed, so the cost per pixel is O(radius) rather than
/// O(radius^2 log radius).
inline GrayImage median_filter(const GrayImage& img, int radius) {
    if (radius < 0) throw std::invalid_argument("median_filter: radius must be non-negative");
    if (radius == 0 || img.empty()) return img;

    const int w = img.width();
    const int h = img.height();
    const int rank = ((2 * radius + 1) * (2 * radius + 1)) / 2;
    auto cx = [w](int x) { return std::clamp(x, 0, w - 1); };
    auto cy = [h](int y) { return std::clamp(y, 0, h - 1); };

    GrayImage out(w, h);
    std::array<int, 256> hist{};
    for (int y = 0; y < h; ++y) {
        hist.fill(0);
        for (int dy = -radius; dy <= radius; ++dy) {
            for (int dx = -radius; dx <= radius; ++dx) ++hist[img(cx(dx), cy(y + dy))];
        }
        int m = 0;
        int below = 0;
        while (below + hist[m] <= rank) below += hist[m++];
        out(0, y) = static_cast<std::uint8_t>(m);

        for (int x = 1; x < w; ++x) {
            const int leaving = cx(x - 1 - radius);
            const int entering = cx(x + radius);
            for (int dy = -radius; dy <= radius; ++dy) {
                const int yy = cy(y + dy);
                const int vo = img(leaving, yy);
                const int vi = img(entering, yy);
                --hist[vo];
                if (vo < m) --below;
                ++hist[vi];
                if (vi < m) ++below;
            }
            while (below > rank) below -= hist[--m];
            while (below + hist[m] <= rank) below += hist[m++];
            out(x, y) = static_cast<std::uint8_t>(m);
        }
    }
    return out;
}

}  // namespace asrg
