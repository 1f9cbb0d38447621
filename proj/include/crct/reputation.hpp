#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "crct/clustering.hpp"
#include "crct/graph.hpp"

namespace crct {

enum class Variant { CR, CRC, CRCT };

struct Method {
    Variant variant = Variant::CR;
    double beta = 2.0;  // CRCT only

    void validate() const {
        if (variant == Variant::CRCT && beta < 1.0)
            throw std::invalid_argument("Method: beta must be >= 1");
    }
};

inline std::string variant_name(Variant v) {
    switch (v) {
        case Variant::CR: return "CR";
        case Variant::CRC: return "CRC";
        case Variant::CRCT: return "CRCT";
    }
    return "?";
}

inline Variant parse_variant(const std::string& s) {
    if (s == "CR") return Variant::CR;
    if (s == "CRC") return Variant::CRC;
    if (s == "CRCT") return Variant::CRCT;
    throw std::invalid_argument("unknown method variant: " + s);
}

struct EngineParams {
    double convergence_threshold = 1e-6;
    int max_iterations = 1000;

    void validate() const {
        if (convergence_threshold <= 0.0)
            throw std::invalid_argument("EngineParams: convergence_threshold must be > 0");
        if (max_iterations < 1)
            throw std::invalid_argument("EngineParams: max_iterations must be >= 1");
    }
};

struct ReputationState {
    std::vector<double> reputations;         // R_i
    std::vector<double> qualities;           // Q_a; NaN for unrated objects
    std::vector<double> previous_qualities;  // quality vector of the prior step
    int iteration = 0;
    bool converged = false;
    double final_change = std::numeric_limits<double>::quiet_NaN();
};

// R_i = k_i / |O|
inline std::vector<double> initial_reputation(const BipartiteRatingGraph& g) {
    std::vector<double> r(g.evaluator_count());
    for (int i = 0; i < g.evaluator_count(); ++i)
        r[i] = static_cast<double>(g.evaluator_degree(i)) / g.object_count();
    return r;
}

// Reputation-weighted mean rating per object. Objects whose raters carry zero
// total reputation fall back to the unweighted mean; unrated objects get NaN.
inline std::vector<double> estimate_quality(const BipartiteRatingGraph& g,
                                            const std::vector<double>& reputations) {
    std::vector<double> q(g.object_count(), std::numeric_limits<double>::quiet_NaN());
    for (int a = 0; a < g.object_count(); ++a) {
        const auto& raters = g.ratings_of(a);
        if (raters.empty()) continue;
        double num = 0.0, den = 0.0;
        for (const auto& [i, r] : raters) {
            num += reputations[i] * r;
            den += reputations[i];
        }
        if (den > 0.0) {
            q[a] = num / den;
        } else {
            double sum = 0.0;
            for (const auto& [i, r] : raters) sum += r;
            q[a] = sum / raters.size();
        }
    }
    return q;
}

// Pearson correlation (population standard deviations) between an evaluator's
// ratings and the current quality estimates of the rated objects, clipped to
// [0,1]. Degenerate cases (degree < 2, zero variance) give 0.
inline std::vector<double> temp_reputation(const BipartiteRatingGraph& g,
                                           const std::vector<double>& qualities) {
    std::vector<double> tr(g.evaluator_count(), 0.0);
    for (int i = 0; i < g.evaluator_count(); ++i) {
        const auto& rated = g.ratings_by(i);
        const std::size_t k = rated.size();
        if (k < 2) continue;
        double mean_r = 0.0, mean_q = 0.0;
        for (const auto& [a, r] : rated) {
            mean_r += r;
            mean_q += qualities[a];
        }
        mean_r /= k;
        mean_q /= k;
        double cov = 0.0, var_r = 0.0, var_q = 0.0;
        for (const auto& [a, r] : rated) {
            const double dr = r - mean_r;
            const double dq = qualities[a] - mean_q;
            cov += dr * dq;
            var_r += dr * dr;
            var_q += dq * dq;
        }
        if (var_r <= 0.0 || var_q <= 0.0) continue;
        const double corr = cov / std::sqrt(var_r * var_q);
        tr[i] = std::clamp(corr, 0.0, 1.0);
    }
    return tr;
}

// TR'_i = sqrt(cc_i / cc_max) * TR_i. With cc_max = 0 the factor is 1
// (refinement disabled on degenerate graphs).
inline std::vector<double> refine_with_clustering(const std::vector<double>& temp_reputations,
                                                  const ClusteringProfile& profile) {
    std::vector<double> out(temp_reputations);
    if (profile.cc_max <= 0.0) return out;
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] *= std::sqrt(profile.cc[i] / profile.cc_max);
    return out;
}

// Sigmoidal penalty-reward map: tr^beta / (tr^beta + (1-tr)^beta).
// Fixed points are 0, 0.5 and 1; beta = 1 is the identity.
inline double penalty_reward(double tr, double beta) {
    if (tr <= 0.0) return 0.0;
    if (tr >= 1.0) return 1.0;
    if (beta == 1.0) return tr;
    const double a = std::pow(tr, beta);
    const double b = std::pow(1.0 - tr, beta);
    return a / (a + b);
}

// Mean squared difference over objects with defined quality on both sides.
inline double quality_change(const std::vector<double>& current,
                             const std::vector<double>& previous) {
    if (current.size() != previous.size())
        throw std::invalid_argument("quality_change: length mismatch");
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t a = 0; a < current.size(); ++a) {
        if (std::isnan(current[a]) || std::isnan(previous[a])) continue;
        const double d = current[a] - previous[a];
        sum += d * d;
        ++n;
    }
    return n == 0 ? 0.0 : sum / n;
}

// Full iterative engine. Each iteration recomputes qualities from the current
// reputations, then reputations from the new qualities (refined / transformed
// per method), until the mean squared quality change drops below the
// threshold. The observer, when set, sees the state at every iteration
// boundary.
inline ReputationState run_engine(
    const BipartiteRatingGraph& g, const Method& method, const EngineParams& params = {},
    const ClusteringProfile* profile = nullptr,
    const std::function<void(const ReputationState&)>& observer = nullptr) {
    method.validate();
    params.validate();
    if (g.edge_count() == 0) throw std::invalid_argument("run_engine: graph has no edges");

    ClusteringProfile local_profile;
    const bool needs_profile = method.variant != Variant::CR;
    if (needs_profile && !profile) {
        local_profile = compute_profile(g);
        profile = &local_profile;
    }

    ReputationState state;
    state.reputations = initial_reputation(g);
    while (state.iteration < params.max_iterations) {
        ++state.iteration;
        state.previous_qualities = std::move(state.qualities);
        state.qualities = estimate_quality(g, state.reputations);

        auto tr = temp_reputation(g, state.qualities);
        if (needs_profile) tr = refine_with_clustering(tr, *profile);
        if (method.variant == Variant::CRCT)
            for (double& v : tr) v = penalty_reward(v, method.beta);
        state.reputations = std::move(tr);

        if (!state.previous_qualities.empty()) {
            state.final_change = quality_change(state.qualities, state.previous_qualities);
            if (state.final_change < params.convergence_threshold) state.converged = true;
        }
        if (observer) observer(state);
        if (state.converged) break;
    }
    return state;
}

// Evaluator ids sorted by ascending reputation, ties by ascending id.
inline std::vector<int> rank_evaluators(const ReputationState& state) {
    std::vector<int> order(state.reputations.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return state.reputations[a] < state.reputations[b];
    });
    return order;
}

// The L lowest-reputation evaluators.
inline std::vector<int> detect_spammers(const ReputationState& state, int L) {
    const int n = static_cast<int>(state.reputations.size());
    if (L < 0 || L > n)
        throw std::invalid_argument("detect_spammers: L out of range");
    auto ranked = rank_evaluators(state);
    ranked.resize(L);
    return ranked;
}

}  // namespace crct
