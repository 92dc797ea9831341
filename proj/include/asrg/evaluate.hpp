#pragma once

// Overlap scoring of a predicted label map against ground truth.

#include "asrg/image.hpp"

#include <algorithm>
#include <cstdint>
#include <map>
#include <set>
#include <utility>
#include <vector>

namespace asrg {

struct RegionMatch {
    std::uint32_t gt_id = 0;
    std::uint32_t pred_id = 0;
    std::uint64_t intersection = 0;
    double dice = 0.0;

    friend bool operator==(const RegionMatch&, const RegionMatch&) = default;
};

struct EvalReport {
    std::size_t n_gt_regions = 0;
    std::size_t n_pred_regions = 0;
    std::vector<RegionMatch> matches;
    double mean_dice = 0.0;
    bool over_segmented = false;
    bool under_segmented = false;
};

/// Pairs whose Dice reaches this level count as a significant overlap for
/// the over- and under-segmentation flags.
inline constexpr double kSignificantDice = 0.1;

inline double dice(std::uint64_t intersection, std::uint64_t size_a, std::uint64_t size_b) {
    if (size_a + size_b == 0) return 1.0;
    return 2.0 * static_cast<double>(intersection) / static_cast<double>(size_a + size_b);
}

/// Greedy one-to-one matching by descending intersection (ties: lower GT id,
/// then lower predicted id). Unmatched GT regions score 0; the mean is over
/// all GT regions. Region ids need not be contiguous.
inline EvalReport dice_match(const LabelMap& pred, const LabelMap& gt) {
    require_same_shape(pred, gt, "dice_match");

    std::map<std::uint32_t, std::uint64_t> pred_size, gt_size;
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> overlap;  // (gt, pred)
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const auto p = pred[i];
        const auto g = gt[i];
        if (p != 0) ++pred_size[p];
        if (g != 0) ++gt_size[g];
        if (p != 0 && g != 0) ++overlap[{g, p}];
    }

    EvalReport report;
    report.n_gt_regions = gt_size.size();
    report.n_pred_regions = pred_size.size();

    std::vector<std::pair<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t>> pairs(overlap.begin(),
                                                                                         overlap.end());
    std::stable_sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) { return a.second > b.second; });
    std::set<std::uint32_t> gt_used, pred_used;
    for (const auto& [ids, inter] : pairs) {
        const auto [g, p] = ids;
        if (gt_used.count(g) || pred_used.count(p)) continue;
        gt_used.insert(g);
        pred_used.insert(p);
        report.matches.push_back({g, p, inter, dice(inter, gt_size[g], pred_size[p])});
    }
    std::sort(report.matches.begin(), report.matches.end(),
              [](const RegionMatch& a, const RegionMatch& b) { return a.gt_id < b.gt_id; });

    if (report.n_gt_regions == 0) {
        report.mean_dice = report.n_pred_regions == 0 ? 1.0 : 0.0;
    } else {
        double total = 0.0;
        for (const auto& m : report.matches) total += m.dice;
        report.mean_dice = total / static_cast<double>(report.n_gt_regions);
    }

    // Over: more predicted regions significantly overlap the matched GT
    // regions than there are matched GT regions. Under: one predicted region
    // significantly overlaps two or more GT regions.
    std::set<std::uint32_t> significant_pred;
    std::map<std::uint32_t, int> gt_hits_per_pred;
    for (const auto& [ids, inter] : overlap) {
        const auto [g, p] = ids;
        if (dice(inter, gt_size[g], pred_size[p]) < kSignificantDice) continue;
        ++gt_hits_per_pred[p];
        if (gt_used.count(g)) significant_pred.insert(p);
    }
    report.over_segmented = significant_pred.size() > gt_used.size();
    report.under_segmented = std::any_of(gt_hits_per_pred.begin(), gt_hits_per_pred.end(),
                                         [](const auto& kv) { return kv.second >= 2; });
    return report;
}

}  // namespace asrg
