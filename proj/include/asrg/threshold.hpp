#pragma once

// Otsu thresholding and binarisation.
//
// Pixels with intensity <= t form class 0, pixels > t form class 1. The
// threshold maximises the between-class variance
//     w0 * w1 * (mu0 - mu1)^2  ==  D^2 / (N^2 * n0 * n1),  D = N*s0 - S*n0,
// where n0/s0 are the count and intensity sum of class 0 and N/S those of
// the whole histogram. Candidates are compared through D^2 / (n0 * n1) as
// exact integer fractions, so ties are real ties and resolve to the lowest t.

#include "asrg/image.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>

namespace asrg {

enum class Polarity { bright_foreground, dark_foreground };

struct OtsuResult {
    int threshold = 0;
    double between_class_variance = 0.0;

    friend bool operator==(const OtsuResult&, const OtsuResult&) = default;
};

namespace detail {

__extension__ using u128 = unsigned __int128;

// Sign of a/b - c/d for non-negative a, c and positive b, d, by continued
// fraction expansion; never overflows.
inline int compare_fractions(u128 a, u128 b, u128 c, u128 d) {
    for (;;) {
        const u128 q1 = a / b, r1 = a % b;
        const u128 q2 = c / d, r2 = c % d;
        if (q1 != q2) return q1 < q2 ? -1 : 1;
        if (r1 == 0 || r2 == 0) {
            if (r1 == r2) return 0;
            return r1 == 0 ? -1 : 1;
        }
        // r1/b vs r2/d has the same sign as d/r2 vs b/r1.
        const u128 na = d, nb = r2, nc = b, nd = r1;
        a = na;
        b = nb;
        c = nc;
        d = nd;
    }
}

}  // namespace detail

/// Histograms above this many pixels would overflow the exact comparison.
inline constexpr std::uint64_t kMaxOtsuPixels = std::uint64_t{1} << 28;

inline OtsuResult otsu_threshold(const Histogram& h) {
    using detail::u128;
    const std::uint64_t total = h.total();
    if (total == 0) throw std::invalid_argument("otsu_threshold: empty histogram");
    if (total > kMaxOtsuPixels) throw std::invalid_argument("otsu_threshold: histogram exceeds 2^28 pixels");

    int occupied = 0;
    int only_level = 0;
    std::uint64_t sum_all = 0;
    for (int v = 0; v < 256; ++v) {
        if (h.counts[v] != 0) {
            ++occupied;
            only_level = v;
        }
        sum_all += h.counts[v] * static_cast<std::uint64_t>(v);
    }
    if (occupied == 1) return {only_level, 0.0};

    int best_t = 0;
    u128 best_num = 0;
    u128 best_den = 1;
    std::uint64_t n0 = 0;
    std::uint64_t s0 = 0;
    for (int t = 0; t < 255; ++t) {
        n0 += h.counts[t];
        s0 += h.counts[t] * static_cast<std::uint64_t>(t);
        const std::uint64_t n1 = total - n0;
        if (n0 == 0 || n1 == 0) continue;
        const u128 a = static_cast<u128>(total) * s0;
        const u128 b = static_cast<u128>(sum_all) * n0;
        const u128 diff = a > b ? a - b : b - a;
        const u128 num = diff * diff;
        const u128 den = static_cast<u128>(n0) * n1;
        if (detail::compare_fractions(num, den, best_num, best_den) > 0) {
            best_t = t;
            best_num = num;
            best_den = den;
        }
    }

    // Recompute the variance of the winner in floating point for reporting.
    n0 = 0;
    s0 = 0;
    for (int t = 0; t <= best_t; ++t) {
        n0 += h.counts[t];
        s0 += h.counts[t] * static_cast<std::uint64_t>(t);
    }
    const std::uint64_t n1 = total - n0;
    double variance = 0.0;
    if (n0 != 0 && n1 != 0) {
        const double w0 = static_cast<double>(n0) / static_cast<double>(total);
        const double w1 = static_cast<double>(n1) / static_cast<double>(total);
        const double mu0 = static_cast<double>(s0) / static_cast<double>(n0);
        const double mu1 = static_cast<double>(sum_all - s0) / static_cast<double>(n1);
        variance = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    }
    return {best_t, variance};
}

inline bool is_foreground(int intensity, int threshold, Polarity p) noexcept {
    return p == Polarity::bright_foreground ? intensity > threshold : intensity <= threshold;
}

inline BinaryMask binarize(const GrayImage& img, int threshold, Polarity p) {
    if (threshold < 0 || threshold > 255) {
        throw std::invalid_argument("binarize: threshold " + std::to_string(threshold) + " outside [0, 255]");
    }
    BinaryMask mask(img.width(), img.height());
    for (std::size_t i = 0; i < img.size(); ++i) mask[i] = is_foreground(img[i], threshold, p) ? 1 : 0;
    return mask;
}

}  // namespace asrg
