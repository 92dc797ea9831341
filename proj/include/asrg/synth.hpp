#pragma once

// Synthetic scenes with known ground truth: flat disks on a flat background
// plus clamped Gaussian noise.

#include "asrg/image.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace asrg {

struct BlobSpec {
    int cx = 0;
    int cy = 0;
    int radius = 1;
    int intensity = 255;

    friend bool operator==(const BlobSpec&, const BlobSpec&) = default;
};

struct SceneSpec {
    int width = 256;
    int height = 256;
    int bg_intensity = 0;
    double noise_sigma = 0.0;
    std::uint64_t rng_seed = 0;
    std::vector<BlobSpec> blobs;
};

struct Scene {
    GrayImage image;
    LabelMap truth;
};

/// Minimum gap, in pixels, between the rims of two blobs.
inline constexpr int kMinBlobSeparation = 3;

/// Throws std::invalid_argument describing the first violated constraint.
inline void validate(const SceneSpec& spec) {
    if (spec.width <= 0 || spec.height <= 0) throw std::invalid_argument("scene: dimensions must be positive");
    if (spec.bg_intensity < 0 || spec.bg_intensity > 255) throw std::invalid_argument("scene: background outside [0, 255]");
    if (!(spec.noise_sigma >= 0.0) || !std::isfinite(spec.noise_sigma)) {
        throw std::invalid_argument("scene: noise sigma must be a non-negative number");
    }
    for (std::size_t i = 0; i < spec.blobs.size(); ++i) {
        const auto& b = spec.blobs[i];
        const std::string tag = "scene: blob " + std::to_string(i);
        if (b.radius <= 0) throw std::invalid_argument(tag + " has non-positive radius");
        if (b.intensity < 0 || b.intensity > 255) throw std::invalid_argument(tag + " intensity outside [0, 255]");
        if (b.cx - b.radius < 0 || b.cy - b.radius < 0 || b.cx + b.radius >= spec.width ||
            b.cy + b.radius >= spec.height) {
            throw std::invalid_argument(tag + " does not fit inside the image");
        }
        if (std::abs(b.intensity - spec.bg_intensity) < 4.0 * spec.noise_sigma) {
            throw std::invalid_argument(tag + " intensity gap to background is below 4 sigma");
        }
        for (std::size_t j = 0; j < i; ++j) {
            const auto& o = spec.blobs[j];
            const long long dx = b.cx - o.cx;
            const long long dy = b.cy - o.cy;
            const long long min_d = b.radius + o.radius + kMinBlobSeparation;
            if (dx * dx + dy * dy < min_d * min_d) {
                throw std::invalid_argument(tag + " overlaps or is closer than " + std::to_string(kMinBlobSeparation) +
                                            " px to blob " + std::to_string(j));
            }
        }
    }
}

namespace detail {

// Box-Muller over mt19937_64, whose output sequence is fixed by the
// standard, so scenes are identical across standard library vendors.
class NormalSource {
public:
    explicit NormalSource(std::uint64_t seed) : gen_(seed) {}

    double next() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform_open();
        const double u2 = uniform_open();
        const double mag = std::sqrt(-2.0 * std::log(u1));
        const double angle = 2.0 * std::numbers::pi * u2;
        spare_ = mag * std::sin(angle);
        has_spare_ = true;
        return mag * std::cos(angle);
    }

private:
    // Uniform on (0, 1].
    double uniform_open() { return static_cast<double>((gen_() >> 11) + 1) * 0x1.0p-53; }

    std::mt19937_64 gen_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace detail

inline Scene generate_blobs(const SceneSpec& spec) {
    validate(spec);
    Scene scene{GrayImage(spec.width, spec.height, static_cast<std::uint8_t>(spec.bg_intensity)),
                LabelMap(spec.width, spec.height)};
    for (std::size_t i = 0; i < spec.blobs.size(); ++i) {
        const auto& b = spec.blobs[i];
        const long long r2 = static_cast<long long>(b.radius) * b.radius;
        for (int y = b.cy - b.radius; y <= b.cy + b.radius; ++y) {
            for (int x = b.cx - b.radius; x <= b.cx + b.radius; ++x) {
                const long long dx = x - b.cx;
                const long long dy = y - b.cy;
                if (dx * dx + dy * dy > r2) continue;
                scene.image(x, y) = static_cast<std::uint8_t>(b.intensity);
                scene.truth(x, y) = static_cast<std::uint32_t>(i + 1);
            }
        }
    }
    if (spec.noise_sigma > 0.0) {
        detail::NormalSource noise(spec.rng_seed);
        for (auto& px : scene.image.pixels()) {
            const double v = std::round(px + spec.noise_sigma * noise.next());
            px = static_cast<std::uint8_t>(std::clamp(v, 0.0, 255.0));
        }
    }
    return scene;
}

}  // namespace asrg
