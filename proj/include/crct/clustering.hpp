#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "crct/graph.hpp"

namespace crct {

// Bipartite clustering coefficients of all evaluators. Depends only on the
// topology, so one profile serves every iteration of the engine.
struct ClusteringProfile {
    std::vector<double> cc;           // per-evaluator, in [0,1]
    double cc_max = 0.0;              // max over all evaluators
    std::vector<int> co_rater_counts; // |N(N(e_i))|, self excluded
};

namespace detail {

// |A ∩ B| for sorted id lists.
inline int sorted_intersection_size(const std::vector<std::pair<int, double>>& a,
                                    const std::vector<std::pair<int, double>>& b) {
    int count = 0;
    std::size_t x = 0, y = 0;
    while (x < a.size() && y < b.size()) {
        if (a[x].first < b[y].first) ++x;
        else if (a[x].first > b[y].first) ++y;
        else { ++count; ++x; ++y; }
    }
    return count;
}

// Co-raters of evaluator i: every other evaluator sharing at least one rated
// object, each counted once.
inline std::vector<int> co_raters(const BipartiteRatingGraph& g, int i) {
    std::vector<int> out;
    for (const auto& [a, r] : g.ratings_by(i))
        for (const auto& [j, rj] : g.ratings_of(a))
            if (j != i) out.push_back(j);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

}  // namespace detail

// Jaccard overlap of the rated-object sets of two distinct evaluators.
inline double pair_cc(const BipartiteRatingGraph& g, int i, int j) {
    if (i == j) throw std::invalid_argument("pair_cc: self-pair excluded");
    const auto& ni = g.ratings_by(i);
    const auto& nj = g.ratings_by(j);
    const int inter = detail::sorted_intersection_size(ni, nj);
    const int uni = static_cast<int>(ni.size() + nj.size()) - inter;
    return uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
}

// Mean pair overlap with all co-raters; 0 when there are none.
inline double node_cc(const BipartiteRatingGraph& g, int i) {
    const auto neighbors = detail::co_raters(g, i);
    if (neighbors.empty()) return 0.0;
    double sum = 0.0;
    for (int j : neighbors) sum += pair_cc(g, i, j);
    return sum / neighbors.size();
}

inline ClusteringProfile compute_profile(const BipartiteRatingGraph& g) {
    const int n = g.evaluator_count();
    ClusteringProfile profile;
    profile.cc.resize(n, 0.0);
    profile.co_rater_counts.resize(n, 0);
    for (int i = 0; i < n; ++i) {
        const auto neighbors = detail::co_raters(g, i);
        profile.co_rater_counts[i] = static_cast<int>(neighbors.size());
        if (neighbors.empty()) continue;
        const auto& ni = g.ratings_by(i);
        double sum = 0.0;
        for (int j : neighbors) {
            const auto& nj = g.ratings_by(j);
            const int inter = detail::sorted_intersection_size(ni, nj);
            const int uni = static_cast<int>(ni.size() + nj.size()) - inter;
            if (uni > 0) sum += static_cast<double>(inter) / uni;
        }
        profile.cc[i] = sum / neighbors.size();
    }
    profile.cc_max = profile.cc.empty()
                         ? 0.0
                         : *std::max_element(profile.cc.begin(), profile.cc.end());
    return profile;
}

struct DegreeCcRow {
    int bin_index;
    double log_degree_lo;
    double log_degree_hi;
    int evaluator_id;
    int degree;
    double cc;
};

// Partitions evaluators into equal-width bins over log10(degree) and lists
// each evaluator's cc in its bin; plot-ready for violin plots. Degree-0
// evaluators are skipped (no defined log degree).
inline std::vector<DegreeCcRow> degree_cc_table(const BipartiteRatingGraph& g,
                                                const ClusteringProfile& profile,
                                                int bins) {
    if (bins < 1) throw std::invalid_argument("degree_cc_table: bins must be >= 1");
    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (int i = 0; i < g.evaluator_count(); ++i) {
        if (g.evaluator_degree(i) == 0) continue;
        const double ld = std::log10(static_cast<double>(g.evaluator_degree(i)));
        if (!any) { lo = hi = ld; any = true; }
        else { lo = std::min(lo, ld); hi = std::max(hi, ld); }
    }
    std::vector<DegreeCcRow> rows;
    if (!any) return rows;
    const double width = (hi - lo) / bins;
    for (int i = 0; i < g.evaluator_count(); ++i) {
        const int k = g.evaluator_degree(i);
        if (k == 0) continue;
        const double ld = std::log10(static_cast<double>(k));
        int b = width > 0.0 ? static_cast<int>((ld - lo) / width) : 0;
        b = std::clamp(b, 0, bins - 1);
        rows.push_back({b, lo + b * width, lo + (b + 1) * width, i, k, profile.cc[i]});
    }
    std::sort(rows.begin(), rows.end(), [](const DegreeCcRow& x, const DegreeCcRow& y) {
        return std::tie(x.bin_index, x.evaluator_id) < std::tie(y.bin_index, y.evaluator_id);
    });
    return rows;
}

}  // namespace crct
