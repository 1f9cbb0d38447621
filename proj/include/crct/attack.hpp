#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "crct/graph.hpp"
#include "crct/synthgen.hpp"

namespace crct {

enum class SpamKind {
    Random,          // arbitrary replacement ratings
    MaliciousPush,   // always the maximum rating
    MaliciousMixed,  // minimum or maximum, equiprobably
};

inline std::string spam_kind_name(SpamKind k) {
    switch (k) {
        case SpamKind::Random: return "random";
        case SpamKind::MaliciousPush: return "malicious_push";
        case SpamKind::MaliciousMixed: return "malicious_mixed";
    }
    return "?";
}

inline SpamKind parse_spam_kind(const std::string& s) {
    if (s == "random") return SpamKind::Random;
    if (s == "malicious_push") return SpamKind::MaliciousPush;
    if (s == "malicious_mixed") return SpamKind::MaliciousMixed;
    throw std::invalid_argument("unknown spam kind: " + s);
}

struct AttackResult {
    BipartiteRatingGraph graph;
    std::vector<int> spammer_ids;  // ground truth, sorted ascending
    long long distorted_edges = 0;
};

namespace detail {

// Distorted rating on the stored [0,1] scale for synthetic data.
inline double distorted_value_synthetic(SpamKind kind, std::mt19937_64& rng) {
    switch (kind) {
        case SpamKind::Random: {
            std::uniform_real_distribution<double> unit(0.0, 1.0);
            return unit(rng);
        }
        case SpamKind::MaliciousPush:
            return 1.0;
        case SpamKind::MaliciousMixed: {
            std::uniform_int_distribution<int> coin(0, 1);
            return coin(rng) ? 1.0 : 0.0;
        }
    }
    return 0.0;
}

// Distorted rating for real data: drawn on the native integer scale and
// mapped to [0,1].
inline double distorted_value_real(SpamKind kind, const RatingScale& scale,
                                   std::mt19937_64& rng) {
    switch (kind) {
        case SpamKind::Random: {
            std::uniform_int_distribution<long long> star(
                static_cast<long long>(scale.min_value), static_cast<long long>(scale.max_value));
            return scale.normalize(static_cast<double>(star(rng)));
        }
        case SpamKind::MaliciousPush:
            return 1.0;
        case SpamKind::MaliciousMixed: {
            std::uniform_int_distribution<int> coin(0, 1);
            return coin(rng) ? 1.0 : 0.0;
        }
    }
    return 0.0;
}

// First `count` entries of a uniformly shuffled copy of `pool`.
template <typename T>
std::vector<T> sample_without_replacement(std::vector<T> pool, std::size_t count,
                                          std::mt19937_64& rng) {
    if (count > pool.size())
        throw std::invalid_argument("sample_without_replacement: count exceeds pool");
    for (std::size_t t = 0; t < count; ++t) {
        std::uniform_int_distribution<std::size_t> pick(t, pool.size() - 1);
        std::swap(pool[t], pool[pick(rng)]);
    }
    pool.resize(count);
    return pool;
}

}  // namespace detail

// Replaces the ratings of round(p * edge_count) uniformly chosen links with
// distorted values; topology unchanged.
inline AttackResult distort_links(const BipartiteRatingGraph& graph, SpamKind kind, double p,
                                  std::uint64_t seed) {
    if (p < 0.0 || p > 1.0) throw std::invalid_argument("distort_links: p must be in [0,1]");
    auto edges = graph.edges();
    const std::size_t count =
        static_cast<std::size_t>(round_half_up(p * static_cast<double>(edges.size())));
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> indices(edges.size());
    for (std::size_t i = 0; i < indices.size(); ++i) indices[i] = i;
    auto chosen = detail::sample_without_replacement(std::move(indices), count, rng);
    std::sort(chosen.begin(), chosen.end());
    for (std::size_t idx : chosen)
        std::get<2>(edges[idx]) = detail::distorted_value_synthetic(kind, rng);
    AttackResult result;
    result.graph =
        BipartiteRatingGraph::from_edges(graph.evaluator_count(), graph.object_count(), edges);
    result.distorted_edges = static_cast<long long>(count);
    return result;
}

// Turns round(rho * |E|) uniformly chosen evaluators into spammers by
// replacing all of their ratings; for synthetic [0,1] data.
inline AttackResult corrupt_evaluators_synthetic(const BipartiteRatingGraph& graph, SpamKind kind,
                                                 double rho, std::uint64_t seed) {
    if (rho < 0.0 || rho > 1.0)
        throw std::invalid_argument("corrupt_evaluators_synthetic: rho must be in [0,1]");
    const std::size_t d =
        static_cast<std::size_t>(round_half_up(rho * graph.evaluator_count()));
    std::mt19937_64 rng(seed);
    std::vector<int> all(graph.evaluator_count());
    for (int i = 0; i < graph.evaluator_count(); ++i) all[i] = i;
    auto spammers = detail::sample_without_replacement(std::move(all), d, rng);
    std::sort(spammers.begin(), spammers.end());

    auto edges = graph.edges();
    std::unordered_set<int> spam(spammers.begin(), spammers.end());
    long long distorted = 0;
    for (auto& [i, a, r] : edges) {
        if (spam.count(i)) {
            r = detail::distorted_value_synthetic(kind, rng);
            ++distorted;
        }
    }
    AttackResult result;
    result.graph =
        BipartiteRatingGraph::from_edges(graph.evaluator_count(), graph.object_count(), edges);
    result.spammer_ids = std::move(spammers);
    result.distorted_edges = distorted;
    return result;
}

// Real-data spammer construction: each of the round(rho * |E|) spammers ends
// with degree exactly k = round(omega * |O|). High-degree spammers keep k
// distorted ratings and lose the rest; low-degree spammers have all ratings
// distorted and gain k - k_i new distorted edges on unrated objects.
inline AttackResult corrupt_evaluators_real(const BipartiteRatingGraph& graph, SpamKind kind,
                                            double rho, double omega, const RatingScale& scale,
                                            std::uint64_t seed) {
    if (rho < 0.0 || rho > 1.0)
        throw std::invalid_argument("corrupt_evaluators_real: rho must be in [0,1]");
    if (!(omega > 0.0 && omega <= 1.0))
        throw std::invalid_argument("corrupt_evaluators_real: omega must be in (0,1]");
    scale.validate();
    const int k = static_cast<int>(round_half_up(omega * graph.object_count()));
    if (k < 1 || k > graph.object_count())
        throw std::invalid_argument("corrupt_evaluators_real: spammer degree k = " +
                                    std::to_string(k) + " out of range");
    const std::size_t d =
        static_cast<std::size_t>(round_half_up(rho * graph.evaluator_count()));
    std::mt19937_64 rng(seed);
    std::vector<int> all(graph.evaluator_count());
    for (int i = 0; i < graph.evaluator_count(); ++i) all[i] = i;
    auto spammers = detail::sample_without_replacement(std::move(all), d, rng);
    std::sort(spammers.begin(), spammers.end());
    std::unordered_set<int> spam(spammers.begin(), spammers.end());

    std::vector<Edge> edges;
    edges.reserve(graph.edge_count());
    for (int i = 0; i < graph.evaluator_count(); ++i)
        if (!spam.count(i))
            for (const auto& [a, r] : graph.ratings_by(i)) edges.emplace_back(i, a, r);

    long long distorted = 0;
    for (int i : spammers) {
        const auto& rated = graph.ratings_by(i);
        const int ki = static_cast<int>(rated.size());
        std::vector<int> targets;
        if (ki >= k) {
            std::vector<int> owned(ki);
            for (int t = 0; t < ki; ++t) owned[t] = rated[t].first;
            targets = detail::sample_without_replacement(std::move(owned),
                                                         static_cast<std::size_t>(k), rng);
        } else {
            targets.reserve(k);
            std::vector<char> is_rated(graph.object_count(), 0);
            for (const auto& [a, r] : rated) {
                targets.push_back(a);
                is_rated[a] = 1;
            }
            std::vector<int> unrated;
            unrated.reserve(graph.object_count() - ki);
            for (int a = 0; a < graph.object_count(); ++a)
                if (!is_rated[a]) unrated.push_back(a);
            auto extra = detail::sample_without_replacement(
                std::move(unrated), static_cast<std::size_t>(k - ki), rng);
            targets.insert(targets.end(), extra.begin(), extra.end());
        }
        std::sort(targets.begin(), targets.end());
        for (int a : targets) {
            edges.emplace_back(i, a, detail::distorted_value_real(kind, scale, rng));
            ++distorted;
        }
    }

    AttackResult result;
    result.graph =
        BipartiteRatingGraph::from_edges(graph.evaluator_count(), graph.object_count(), edges);
    result.spammer_ids = std::move(spammers);
    result.distorted_edges = distorted;
    return result;
}

}  // namespace crct
