#pragma once

// Deterministic K-means over 3-D feature vectors.
//
// Each start runs Lloyd iterations and then Hartigan single-point moves,
// which escape many of the poor fixed points Lloyd stops at on small or
// unstructured data. Start 0 uses the farthest-point initialisation; the
// remaining starts use k-means++ sampling driven by `rng_seed`. The start
// with the lowest inertia wins (earliest start on ties).
//
// Sampling walks the points in lexicographic order rather than input order,
// so permuting the input changes only how exact ties are broken.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace asrg {

/// Normalised (x, y, intensity) feature of a pixel.
struct FeatureVector {
    double fx = 0.0;
    double fy = 0.0;
    double fi = 0.0;

    friend bool operator==(const FeatureVector&, const FeatureVector&) = default;
    friend auto operator<=>(const FeatureVector&, const FeatureVector&) = default;
};

inline double squared_distance(const FeatureVector& a, const FeatureVector& b) noexcept {
    const double dx = a.fx - b.fx;
    const double dy = a.fy - b.fy;
    const double di = a.fi - b.fi;
    return dx * dx + dy * dy + di * di;
}

struct KMeansModel {
    std::vector<FeatureVector> centroids;
    std::vector<int> assignments;
    double inertia = 0.0;
    /// Lloyd updates performed by the winning start.
    int iterations = 0;
    /// Index of the winning start; 0 is the farthest-point start.
    int start = 0;
    /// Inertia of the winning start after initial assignment, after every
    /// Lloyd update and after refinement.
    std::vector<double> inertia_history;
};

struct KMeansOptions {
    int max_iter = 100;
    double tol = 1e-6;
    /// k-means++ starts in addition to the farthest-point start.
    int restarts = 10;
    /// Hartigan single-point refinement after Lloyd.
    bool refine = true;
};

/// Index of the nearest centroid; ties go to the lowest index.
inline int assign(std::span<const FeatureVector> centroids, const FeatureVector& p) {
    if (centroids.empty()) throw std::invalid_argument("assign: model has no centroids");
    int best = 0;
    double best_d = squared_distance(p, centroids[0]);
    for (std::size_t j = 1; j < centroids.size(); ++j) {
        const double d = squared_distance(p, centroids[j]);
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(j);
        }
    }
    return best;
}

inline int assign(const KMeansModel& model, const FeatureVector& p) { return assign(model.centroids, p); }

inline std::size_t count_distinct(std::span<const FeatureVector> points) {
    std::vector<FeatureVector> sorted(points.begin(), points.end());
    std::sort(sorted.begin(), sorted.end());
    return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

namespace detail {

// First centre: the point nearest the dataset mean. Each next centre: the
// point farthest from all centres chosen so far. Ties go to the lowest index.
inline std::vector<FeatureVector> farthest_point_init(std::span<const FeatureVector> points, int k) {
    FeatureVector mean;
    for (const auto& p : points) {
        mean.fx += p.fx;
        mean.fy += p.fy;
        mean.fi += p.fi;
    }
    const double n = static_cast<double>(points.size());
    mean = {mean.fx / n, mean.fy / n, mean.fi / n};

    std::size_t first = 0;
    double first_d = squared_distance(points[0], mean);
    for (std::size_t i = 1; i < points.size(); ++i) {
        const double d = squared_distance(points[i], mean);
        if (d < first_d) {
            first_d = d;
            first = i;
        }
    }

    std::vector<FeatureVector> centers{points[first]};
    std::vector<double> min_d(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) min_d[i] = squared_distance(points[i], centers[0]);
    while (static_cast<int>(centers.size()) < k) {
        std::size_t next = 0;
        for (std::size_t i = 1; i < points.size(); ++i) {
            if (min_d[i] > min_d[next]) next = i;
        }
        centers.push_back(points[next]);
        for (std::size_t i = 0; i < points.size(); ++i) {
            min_d[i] = std::min(min_d[i], squared_distance(points[i], points[next]));
        }
    }
    return centers;
}

inline double uniform01(std::mt19937_64& gen) { return static_cast<double>(gen() >> 11) * 0x1.0p-53; }

// k-means++ seeding over `order` (a canonical ordering of the points).
inline std::vector<FeatureVector> kmeanspp_init(std::span<const FeatureVector> points,
                                                std::span<const std::size_t> order, int k, std::mt19937_64& gen) {
    const std::size_t n = points.size();
    std::vector<FeatureVector> centers{points[order[gen() % n]]};
    std::vector<double> min_d(n);
    for (std::size_t i = 0; i < n; ++i) min_d[i] = squared_distance(points[order[i]], centers[0]);
    while (static_cast<int>(centers.size()) < k) {
        double total = 0.0;
        for (auto d : min_d) total += d;
        const double target = uniform01(gen) * total;
        std::size_t pick = n;
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (min_d[i] <= 0.0) continue;
            acc += min_d[i];
            pick = i;
            if (acc > target) break;
        }
        if (pick == n) break;
        centers.push_back(points[order[pick]]);
        for (std::size_t i = 0; i < n; ++i) {
            min_d[i] = std::min(min_d[i], squared_distance(points[order[i]], points[order[pick]]));
        }
    }
    return centers;
}

inline double assign_all(std::span<const FeatureVector> points, std::span<const FeatureVector> centroids,
                         std::vector<int>& assignments) {
    double inertia = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        assignments[i] = assign(centroids, points[i]);
        inertia += squared_distance(points[i], centroids[static_cast<std::size_t>(assignments[i])]);
    }
    return inertia;
}

// Centroids as exact means of the current assignments. Empty clusters keep
// an all-zero centroid and are flagged in `counts`.
inline std::vector<FeatureVector> cluster_means(std::span<const FeatureVector> points, const std::vector<int>& assignments,
                                                std::size_t k, std::vector<std::size_t>& counts) {
    std::vector<FeatureVector> sums(k);
    counts.assign(k, 0);
    for (std::size_t i = 0; i < points.size(); ++i) {
        auto& s = sums[static_cast<std::size_t>(assignments[i])];
        s.fx += points[i].fx;
        s.fy += points[i].fy;
        s.fi += points[i].fi;
        ++counts[static_cast<std::size_t>(assignments[i])];
    }
    for (std::size_t j = 0; j < k; ++j) {
        if (counts[j] == 0) continue;
        const double c = static_cast<double>(counts[j]);
        sums[j] = {sums[j].fx / c, sums[j].fy / c, sums[j].fi / c};
    }
    return sums;
}

// Lloyd iterations from the given centres. Stops at a fixed point of the
// assignments, when no centroid moves by `tol` or more, or after max_iter
// updates. A cluster that empties is re-seeded with the point farthest from
// its own centroid.
inline KMeansModel lloyd(std::span<const FeatureVector> points, std::vector<FeatureVector> init,
                         const KMeansOptions& opts) {
    const std::size_t k = init.size();
    KMeansModel model;
    model.centroids = std::move(init);
    model.assignments.assign(points.size(), 0);
    model.inertia = assign_all(points, model.centroids, model.assignments);
    model.inertia_history.push_back(model.inertia);

    std::vector<std::size_t> counts;
    std::vector<int> previous;
    for (int it = 0; it < opts.max_iter; ++it) {
        auto next = cluster_means(points, model.assignments, k, counts);
        std::vector<bool> taken(points.size(), false);
        for (std::size_t j = 0; j < k; ++j) {
            if (counts[j] != 0) continue;
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < points.size(); ++i) {
                if (taken[i]) continue;
                const double d = squared_distance(points[i], next[static_cast<std::size_t>(model.assignments[i])]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            taken[far] = true;
            next[j] = points[far];
        }

        double shift = 0.0;
        for (std::size_t j = 0; j < k; ++j) shift = std::max(shift, squared_distance(next[j], model.centroids[j]));
        model.centroids = std::move(next);
        previous = model.assignments;
        model.inertia = assign_all(points, model.centroids, model.assignments);
        model.inertia_history.push_back(model.inertia);
        model.iterations = it + 1;
        if (previous == model.assignments || shift < opts.tol * opts.tol) break;
    }
    return model;
}

// Hartigan refinement: move single points between clusters while the move
// strictly lowers the total squared error. Moving p from A (size a) to B
// (size b) changes the error by  b/(b+1)|p-cB|^2 - a/(a-1)|p-cA|^2.
// A Hartigan-stable partition is also Lloyd-stable, so the final centroids
// are recomputed as exact means and every point stays with its nearest one.
inline void hartigan_refine(std::span<const FeatureVector> points, KMeansModel& model) {
    const std::size_t k = model.centroids.size();
    std::vector<std::size_t> counts;
    model.centroids = cluster_means(points, model.assignments, k, counts);
    const std::size_t max_moves = 64 * points.size() + 64;
    std::size_t moves = 0;
    bool moved = true;
    while (moved && moves < max_moves) {
        moved = false;
        for (std::size_t i = 0; i < points.size() && moves < max_moves; ++i) {
            const auto a = static_cast<std::size_t>(model.assignments[i]);
            if (counts[a] <= 1) continue;
            const double na = static_cast<double>(counts[a]);
            const double cost_out = squared_distance(points[i], model.centroids[a]) * na / (na - 1.0);
            std::size_t target = k;
            double best = cost_out * (1.0 - 1e-12);
            for (std::size_t b = 0; b < k; ++b) {
                if (b == a) continue;
                const double nb = static_cast<double>(counts[b]);
                const double cost_in = squared_distance(points[i], model.centroids[b]) * nb / (nb + 1.0);
                if (cost_in < best) {
                    best = cost_in;
                    target = b;
                }
            }
            if (target == k) continue;
            auto& ca = model.centroids[a];
            auto& cb = model.centroids[target];
            const double nb = static_cast<double>(counts[target]);
            const auto& p = points[i];
            ca = {(ca.fx * na - p.fx) / (na - 1), (ca.fy * na - p.fy) / (na - 1), (ca.fi * na - p.fi) / (na - 1)};
            cb = {(cb.fx * nb + p.fx) / (nb + 1), (cb.fy * nb + p.fy) / (nb + 1), (cb.fi * nb + p.fi) / (nb + 1)};
            --counts[a];
            ++counts[target];
            model.assignments[i] = static_cast<int>(target);
            moved = true;
            ++moves;
        }
    }
    model.centroids = cluster_means(points, model.assignments, k, counts);
    assign_all(points, model.centroids, model.assignments);
    // Reassignment of a stable partition only changes exact ties.
    model.centroids = cluster_means(points, model.assignments, k, counts);
    double inertia = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        inertia += squared_distance(points[i], model.centroids[static_cast<std::size_t>(model.assignments[i])]);
    }
    model.inertia = inertia;
    model.inertia_history.push_back(model.inertia);
}

}  // namespace detail

/// Clusters `points` into k groups; see the file comment for the search.
inline KMeansModel kmeans(std::span<const FeatureVector> points, int k, std::uint64_t rng_seed = 0,
                          KMeansOptions opts = {}) {
    if (k < 1) throw std::invalid_argument("kmeans: K must be at least 1");
    const auto distinct = count_distinct(points);
    if (static_cast<std::size_t>(k) > distinct) {
        throw std::invalid_argument("kmeans: K = " + std::to_string(k) + " exceeds the number of distinct points (" +
                                    std::to_string(distinct) + ")");
    }

    auto run = [&](std::vector<FeatureVector> init) {
        KMeansModel m = detail::lloyd(points, std::move(init), opts);
        if (opts.refine) detail::hartigan_refine(points, m);
        return m;
    };

    KMeansModel best = run(detail::farthest_point_init(points, k));
    if (opts.restarts <= 0 || k == 1) return best;

    std::vector<std::size_t> order(points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return points[a] < points[b]; });
    std::mt19937_64 gen(rng_seed);
    for (int r = 1; r <= opts.restarts; ++r) {
        auto init = detail::kmeanspp_init(points, order, k, gen);
        if (static_cast<int>(init.size()) < k) continue;
        KMeansModel m = run(std::move(init));
        if (m.inertia < best.inertia) {
            best = std::move(m);
            best.start = r;
        }
    }
    return best;
}

}  // namespace asrg
