#pragma once

// Connected-component extraction of foreground regions (ROIs).

#include "asrg/image.hpp"

#include <algorithm>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

namespace asrg {

enum class Connectivity { four, eight };

struct BoundingBox {
    int min_x = 0, min_y = 0, max_x = 0, max_y = 0;

    bool contains(double x, double y) const noexcept {
        return x >= min_x && x <= max_x && y >= min_y && y <= max_y;
    }

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Roi {
    std::uint32_t id = 0;
    std::uint64_t pixel_count = 0;
    BoundingBox bbox;
    double centroid_x = 0.0;
    double centroid_y = 0.0;

    friend bool operator==(const Roi&, const Roi&) = default;
};

struct Components {
    LabelMap labels;
    std::vector<Roi> rois;
};

/// Neighbour offsets for the given adjacency, 4 or 8 entries.
inline std::span<const Point> neighbor_offsets(Connectivity c) noexcept {
    static constexpr Point k8[] = {{0, -1}, {-1, 0}, {1, 0}, {0, 1}, {-1, -1}, {1, -1}, {-1, 1}, {1, 1}};
    return {k8, c == Connectivity::four ? 4u : 8u};
}

/// Recomputes per-label statistics from a label map.
inline std::vector<Roi> roi_stats(const LabelMap& labels) {
    const auto n = max_label(labels);
    std::vector<Roi> rois(n);
    std::vector<double> sx(n, 0.0), sy(n, 0.0);
    for (std::uint32_t i = 0; i < n; ++i) {
        rois[i].id = i + 1;
        rois[i].bbox = {labels.width(), labels.height(), -1, -1};
    }
    for (int y = 0; y < labels.height(); ++y) {
        for (int x = 0; x < labels.width(); ++x) {
            const auto l = labels(x, y);
            if (l == 0) continue;
            auto& r = rois[l - 1];
            ++r.pixel_count;
            sx[l - 1] += x;
            sy[l - 1] += y;
            r.bbox.min_x = std::min(r.bbox.min_x, x);
            r.bbox.min_y = std::min(r.bbox.min_y, y);
            r.bbox.max_x = std::max(r.bbox.max_x, x);
            r.bbox.max_y = std::max(r.bbox.max_y, y);
        }
    }
    for (std::uint32_t i = 0; i < n; ++i) {
        if (rois[i].pixel_count == 0) continue;
        rois[i].centroid_x = sx[i] / static_cast<double>(rois[i].pixel_count);
        rois[i].centroid_y = sy[i] / static_cast<double>(rois[i].pixel_count);
    }
    return rois;
}

/// Labels maximal connected foreground sets 1..n in raster order of each
/// component's first pixel. Two-pass union-find over already-visited
/// neighbours.
inline Components connected_components(const BinaryMask& mask, Connectivity c) {
    const int w = mask.width();
    const int h = mask.height();
    std::vector<std::uint32_t> provisional(mask.size(), 0);
    std::vector<std::uint32_t> parent{0};

    auto find = [&parent](std::uint32_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    auto unite = [&](std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        // Keep the smaller root so roots stay the earliest-created label.
        if (a < b) parent[b] = a;
        else parent[a] = b;
    };

    // Causal neighbours: W, N, and for 8-connectivity NW and NE.
    static constexpr Point causal[] = {{-1, 0}, {0, -1}, {-1, -1}, {1, -1}};
    const std::size_t n_causal = c == Connectivity::four ? 2 : 4;

    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const auto i = mask.index(x, y);
            if (!mask[i]) continue;
            std::uint32_t current = 0;
            for (std::size_t k = 0; k < n_causal; ++k) {
                const int nx = x + causal[k].x;
                const int ny = y + causal[k].y;
                if (!mask.contains(nx, ny)) continue;
                const auto nl = provisional[mask.index(nx, ny)];
                if (nl == 0) continue;
                if (current == 0) current = nl;
                else unite(current, nl);
            }
            if (current == 0) {
                current = static_cast<std::uint32_t>(parent.size());
                parent.push_back(current);
            }
            provisional[i] = current;
        }
    }

    // Provisional labels are created in raster order and roots are the
    // smallest member, so numbering roots by first appearance gives raster
    // order of each component's first pixel.
    std::vector<std::uint32_t> final_id(parent.size(), 0);
    std::uint32_t next = 0;
    std::vector<std::uint32_t> out(mask.size(), 0);
    for (std::size_t i = 0; i < provisional.size(); ++i) {
        if (provisional[i] == 0) continue;
        const auto root = find(provisional[i]);
        if (final_id[root] == 0) final_id[root] = ++next;
        out[i] = final_id[root];
    }

    Components result{LabelMap(w, h, std::move(out)), {}};
    result.rois = roi_stats(result.labels);
    return result;
}

/// Drops components smaller than `min_area` and compacts the surviving ids
/// to 1..m in their original order.
inline Components filter_small(const std::vector<Roi>& rois, const LabelMap& labels, std::uint64_t min_area) {
    std::vector<std::uint32_t> remap(static_cast<std::size_t>(max_label(labels)) + 1, 0);
    std::vector<Roi> kept;
    for (const auto& r : rois) {
        if (r.id == 0 || r.id >= remap.size()) throw std::invalid_argument("filter_small: roi list does not match labels");
        if (r.pixel_count < min_area) continue;
        Roi copy = r;
        copy.id = static_cast<std::uint32_t>(kept.size() + 1);
        remap[r.id] = copy.id;
        kept.push_back(copy);
    }
    LabelMap out(labels.width(), labels.height());
    for (std::size_t i = 0; i < labels.size(); ++i) out[i] = remap[labels[i]];
    return {std::move(out), std::move(kept)};
}

inline BinaryMask mask_from_labels(const LabelMap& labels) {
    BinaryMask mask(labels.width(), labels.height());
    for (std::size_t i = 0; i < labels.size(); ++i) mask[i] = labels[i] != 0 ? 1 : 0;
    return mask;
}

}  // namespace asrg
