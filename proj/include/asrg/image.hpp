#pragma once

// Raster value types shared by every stage of the pipeline.
//
// All rasters are row-major with x = column, y = row and the origin at the
// top-left corner.

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace asrg {

struct Point {
    int x = 0;
    int y = 0;

    friend bool operator==(const Point&, const Point&) = default;
};

namespace detail {

inline std::size_t checked_area(int width, int height) {
    if (width <= 0 || height <= 0) {
        throw std::invalid_argument("raster dimensions must be positive, got " +
                                    std::to_string(width) + "x" + std::to_string(height));
    }
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
}

}  // namespace detail

/// Row-major raster with positive dimensions. The pixel buffer always holds
/// exactly width * height elements.
template <typename T>
class Raster {
public:
    using value_type = T;

    Raster() = default;

    Raster(int width, int height, T fill = T{})
        : width_(width), height_(height), data_(detail::checked_area(width, height), fill) {}

    Raster(int width, int height, std::vector<T> data)
        : width_(width), height_(height), data_(std::move(data)) {
        if (data_.size() != detail::checked_area(width, height)) {
            throw std::invalid_argument("pixel buffer length " + std::to_string(data_.size()) +
                                        " does not match " + std::to_string(width) + "x" +
                                        std::to_string(height));
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    bool contains(int x, int y) const noexcept {
        return x >= 0 && y >= 0 && x < width_ && y < height_;
    }

    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
               static_cast<std::size_t>(x);
    }

    T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }
    const T& operator()(int x, int y) const noexcept { return data_[index(x, y)]; }

    T& operator[](std::size_t i) noexcept { return data_[i]; }
    const T& operator[](std::size_t i) const noexcept { return data_[i]; }

    std::span<T> pixels() noexcept { return data_; }
    std::span<const T> pixels() const noexcept { return data_; }

    bool same_shape(const auto& other) const noexcept {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

/// 8-bit intensities; every value of uint8_t is a valid intensity.
using GrayImage = Raster<std::uint8_t>;

/// Foreground is stored as 1, background as 0.
using BinaryMask = Raster<std::uint8_t>;

/// Region ids, 0 = background.
using LabelMap = Raster<std::uint32_t>;

template <typename A, typename B>
void require_same_shape(const A& a, const B& b, const char* what) {
    if (!a.same_shape(b)) {
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                    std::to_string(a.width()) + "x" + std::to_string(a.height()) +
                                    " vs " + std::to_string(b.width()) + "x" +
                                    std::to_string(b.height()) + ")");
    }
}

struct Histogram {
    std::array<std::uint64_t, 256> counts{};

    std::uint64_t total() const noexcept {
        std::uint64_t sum = 0;
        for (auto c : counts) sum += c;
        return sum;
    }

    friend bool operator==(const Histogram&, const Histogram&) = default;
};

inline Histogram histogram(const GrayImage& img) {
    Histogram h;
    for (auto v : img.pixels()) ++h.counts[v];
    return h;
}

/// Largest label present in the map.
inline std::uint32_t max_label(const LabelMap& labels) {
    std::uint32_t m = 0;
    for (auto v : labels.pixels()) m = v > m ? v : m;
    return m;
}

/// True when the labels in use are exactly {0, 1, ..., max_label} (0 may be
/// absent when every pixel is labeled).
inline bool has_contiguous_labels(const LabelMap& labels) {
    const auto n = max_label(labels);
    std::vector<bool> seen(static_cast<std::size_t>(n) + 1, false);
    for (auto v : labels.pixels()) seen[v] = true;
    for (std::uint32_t id = 1; id <= n; ++id) {
        if (!seen[id]) return false;
    }
    return true;
}

/// Per-id pixel tallies; entry 0 counts background.
inline std::vector<std::uint64_t> label_sizes(const LabelMap& labels) {
    std::vector<std::uint64_t> sizes(static_cast<std::size_t>(max_label(labels)) + 1, 0);
    for (auto v : labels.pixels()) ++sizes[v];
    return sizes;
}

}  // namespace asrg
