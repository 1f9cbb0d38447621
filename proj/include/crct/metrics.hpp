#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace crct {

namespace detail {

// Merge-sort inversion count: pairs (i < j) with v[i] > v[j] strictly.
inline std::int64_t count_inversions(std::vector<double>& v, std::vector<double>& buf,
                                     std::size_t lo, std::size_t hi) {
    if (hi - lo < 2) return 0;
    const std::size_t mid = lo + (hi - lo) / 2;
    std::int64_t inv = count_inversions(v, buf, lo, mid) + count_inversions(v, buf, mid, hi);
    std::size_t a = lo, b = mid, out = lo;
    while (a < mid && b < hi) {
        if (v[b] < v[a]) {
            inv += static_cast<std::int64_t>(mid - a);
            buf[out++] = v[b++];
        } else {
            buf[out++] = v[a++];
        }
    }
    while (a < mid) buf[out++] = v[a++];
    while (b < hi) buf[out++] = v[b++];
    std::copy(buf.begin() + lo, buf.begin() + hi, v.begin() + lo);
    return inv;
}

inline std::int64_t tie_pair_count(const std::vector<double>& sorted) {
    std::int64_t pairs = 0;
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i + 1;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        const std::int64_t t = static_cast<std::int64_t>(j - i);
        pairs += t * (t - 1) / 2;
        i = j;
    }
    return pairs;
}

}  // namespace detail

// Kendall rank correlation with sgn(0) = 0 for tied pairs and the plain
// n(n-1)/2 denominator. Knight's O(n log n) algorithm; the numerator is an
// exact integer, so the result matches pairwise enumeration bit for bit.
inline double kendall_tau(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n != y.size()) throw std::invalid_argument("kendall_tau: length mismatch");
    if (n < 2) throw std::invalid_argument("kendall_tau: need at least 2 elements");

    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (x[a] != x[b]) return x[a] < x[b];
        return y[a] < y[b];
    });

    // Pairs tied in x, and tied in both, found by walking x-tie groups.
    std::int64_t ties_x = 0, ties_both = 0;
    {
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i + 1;
            while (j < n && x[order[j]] == x[order[i]]) ++j;
            const std::int64_t t = static_cast<std::int64_t>(j - i);
            ties_x += t * (t - 1) / 2;
            std::size_t a = i;
            while (a < j) {
                std::size_t b = a + 1;
                while (b < j && y[order[b]] == y[order[a]]) ++b;
                const std::int64_t s = static_cast<std::int64_t>(b - a);
                ties_both += s * (s - 1) / 2;
                a = b;
            }
            i = j;
        }
    }

    std::vector<double> ys(n), buf(n);
    for (std::size_t i = 0; i < n; ++i) ys[i] = y[order[i]];
    const std::int64_t discordant = detail::count_inversions(ys, buf, 0, n);

    std::sort(ys.begin(), ys.end());
    const std::int64_t ties_y = detail::tie_pair_count(ys);

    const std::int64_t total = static_cast<std::int64_t>(n) * (n - 1) / 2;
    // concordant - discordant, with pairs tied in either coordinate scoring 0
    const std::int64_t numerator = total - ties_x - ties_y + ties_both - 2 * discordant;
    return static_cast<double>(numerator) / static_cast<double>(total);
}

enum class TieRule {
    HalfCredit,  // Mann-Whitney convention: ties count 0.5
    FullCredit,  // ties count 1.0
};

// Exact probability that a value from `high` exceeds a value from `low`,
// over all pairs, with the chosen tie credit. Integer pair counting, so the
// result equals brute-force enumeration.
inline double auc_exact(const std::vector<double>& high, const std::vector<double>& low,
                        TieRule ties = TieRule::HalfCredit) {
    if (high.empty() || low.empty())
        throw std::invalid_argument("auc_exact: both classes must be non-empty");
    std::vector<double> sorted_low(low);
    std::sort(sorted_low.begin(), sorted_low.end());
    std::int64_t credit2 = 0;  // in units of half a pair
    for (double v : high) {
        const auto lo = std::lower_bound(sorted_low.begin(), sorted_low.end(), v);
        const auto hi = std::upper_bound(lo, sorted_low.end(), v);
        const std::int64_t wins = lo - sorted_low.begin();
        const std::int64_t tied = hi - lo;
        credit2 += 2 * wins + (ties == TieRule::HalfCredit ? tied : 2 * tied);
    }
    const std::int64_t total2 =
        2 * static_cast<std::int64_t>(high.size()) * static_cast<std::int64_t>(low.size());
    return static_cast<double>(credit2) / static_cast<double>(total2);
}

// Same statistic estimated from N uniformly sampled pairs.
inline double auc_sampled(const std::vector<double>& high, const std::vector<double>& low,
                          std::int64_t samples, std::uint64_t seed,
                          TieRule ties = TieRule::HalfCredit) {
    if (high.empty() || low.empty())
        throw std::invalid_argument("auc_sampled: both classes must be non-empty");
    if (samples < 1) throw std::invalid_argument("auc_sampled: samples must be >= 1");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick_high(0, high.size() - 1);
    std::uniform_int_distribution<std::size_t> pick_low(0, low.size() - 1);
    std::int64_t credit2 = 0;
    for (std::int64_t s = 0; s < samples; ++s) {
        const double h = high[pick_high(rng)];
        const double l = low[pick_low(rng)];
        if (h > l) credit2 += 2;
        else if (h == l) credit2 += (ties == TieRule::HalfCredit ? 1 : 2);
    }
    return static_cast<double>(credit2) / static_cast<double>(2 * samples);
}

// Probability that a random normal evaluator outranks a random spammer.
inline double auc_evaluators(const std::vector<double>& reputations,
                             const std::vector<int>& spammer_ids,
                             TieRule ties = TieRule::HalfCredit) {
    std::unordered_set<int> spam(spammer_ids.begin(), spammer_ids.end());
    std::vector<double> normal, spammer;
    for (std::size_t i = 0; i < reputations.size(); ++i) {
        if (spam.count(static_cast<int>(i))) spammer.push_back(reputations[i]);
        else normal.push_back(reputations[i]);
    }
    if (normal.empty() || spammer.empty())
        throw std::invalid_argument("auc_evaluators: need at least one of each class");
    return auc_exact(normal, spammer, ties);
}

// Probability that a random benchmark object's estimated quality exceeds a
// random non-benchmark object's. Objects with undefined (NaN) quality are
// excluded.
inline double auc_objects(const std::vector<double>& estimated_qualities,
                          const std::vector<int>& benchmark_ids,
                          TieRule ties = TieRule::HalfCredit) {
    std::unordered_set<int> bench(benchmark_ids.begin(), benchmark_ids.end());
    std::vector<double> high, low;
    for (std::size_t a = 0; a < estimated_qualities.size(); ++a) {
        if (std::isnan(estimated_qualities[a])) continue;
        if (bench.count(static_cast<int>(a))) high.push_back(estimated_qualities[a]);
        else low.push_back(estimated_qualities[a]);
    }
    if (high.empty() || low.empty())
        throw std::invalid_argument("auc_objects: benchmark set must be a proper non-empty subset");
    return auc_exact(high, low, ties);
}

// Fraction of true spammers among the first L entries of the ascending ranking.
inline double recall_at(const std::vector<int>& ranked_evaluators,
                        const std::vector<int>& spammer_ids, int L) {
    if (spammer_ids.empty()) throw std::invalid_argument("recall_at: no spammers");
    if (L < 0 || L > static_cast<int>(ranked_evaluators.size()))
        throw std::invalid_argument("recall_at: L out of range");
    std::unordered_set<int> spam(spammer_ids.begin(), spammer_ids.end());
    int found = 0;
    for (int pos = 0; pos < L; ++pos)
        if (spam.count(ranked_evaluators[pos])) ++found;
    return static_cast<double>(found) / spam.size();
}

// Mean normalized 1-based rank of spammers in the ascending ranking;
// lower is better.
inline double ranking_score(const std::vector<int>& ranked_evaluators,
                            const std::vector<int>& spammer_ids) {
    if (spammer_ids.empty()) throw std::invalid_argument("ranking_score: no spammers");
    std::unordered_set<int> spam(spammer_ids.begin(), spammer_ids.end());
    const double n = static_cast<double>(ranked_evaluators.size());
    double sum = 0.0;
    std::size_t found = 0;
    for (std::size_t pos = 0; pos < ranked_evaluators.size(); ++pos) {
        if (spam.count(ranked_evaluators[pos])) {
            sum += static_cast<double>(pos + 1) / n;
            ++found;
        }
    }
    if (found != spam.size())
        throw std::invalid_argument("ranking_score: spammer id missing from ranking");
    return sum / spam.size();
}

}  // namespace crct
