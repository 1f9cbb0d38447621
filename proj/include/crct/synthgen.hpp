#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <unordered_set>
#include <vector>

#include "crct/graph.hpp"

namespace crct {

inline long long round_half_up(double x) {
    return static_cast<long long>(std::floor(x + 0.5));
}

struct SynthConfig {
    int evaluator_count = 6000;
    int object_count = 4000;
    double sparsity = 0.02;    // eta
    double delta_min = 0.1;
    double delta_max = 0.5;
    std::uint64_t seed = 0;

    void validate() const {
        if (evaluator_count < 1 || object_count < 1)
            throw std::invalid_argument("SynthConfig: node counts must be positive");
        if (!(sparsity > 0.0 && sparsity <= 1.0))
            throw std::invalid_argument("SynthConfig: sparsity must be in (0,1]");
        if (delta_min < 0.0 || delta_min > delta_max)
            throw std::invalid_argument("SynthConfig: need 0 <= delta_min <= delta_max");
    }
};

struct SyntheticGroundTruth {
    std::vector<double> intrinsic_qualities;  // per object, U(0,1)
    std::vector<double> evaluator_sigmas;     // per evaluator, U(delta_min, delta_max)
    std::vector<int> spammer_ids;             // filled by the attack module
};

struct SyntheticDataset {
    BipartiteRatingGraph graph;
    SyntheticGroundTruth truth;
};

namespace detail {

// One endpoint draw with probability (k+1)/(sum k + n): with probability
// sum_k/(sum_k+n) pick a slot from the degree-repeated endpoint list,
// otherwise a uniform node. Exactly the smoothed preferential-attachment
// weights, in O(1) per draw.
class PreferentialPicker {
public:
    explicit PreferentialPicker(int n) : n_(n) {}

    int draw(std::mt19937_64& rng) {
        const std::uint64_t total = endpoints_.size() + static_cast<std::uint64_t>(n_);
        std::uniform_int_distribution<std::uint64_t> pick(0, total - 1);
        const std::uint64_t v = pick(rng);
        if (v < endpoints_.size()) return endpoints_[v];
        return static_cast<int>(v - endpoints_.size());
    }

    void record(int node) { endpoints_.push_back(node); }

private:
    int n_;
    std::vector<int> endpoints_;
};

}  // namespace detail

// Grows exactly round(eta * |E| * |O|) distinct edges; each step draws the
// evaluator and the object independently with the smoothed preferential
// weights and resamples collisions.
inline std::vector<std::pair<int, int>> generate_topology(const SynthConfig& config,
                                                          std::mt19937_64& rng) {
    config.validate();
    const long long target = round_half_up(config.sparsity *
                                           static_cast<double>(config.evaluator_count) *
                                           config.object_count);
    const long long cells =
        static_cast<long long>(config.evaluator_count) * config.object_count;
    if (target > cells)
        throw std::invalid_argument("generate_topology: target edge count exceeds |E|*|O|");

    detail::PreferentialPicker evaluators(config.evaluator_count);
    detail::PreferentialPicker objects(config.object_count);
    std::unordered_set<std::int64_t> seen;
    seen.reserve(static_cast<std::size_t>(target) * 2);
    std::vector<std::pair<int, int>> edges;
    edges.reserve(static_cast<std::size_t>(target));

    long long attempts = 0;
    const long long max_attempts = 100 * target;
    while (static_cast<long long>(edges.size()) < target) {
        if (++attempts > max_attempts)
            throw std::runtime_error("generate_topology: collision resampling budget exhausted; "
                                     "sparsity too close to 1");
        const int i = evaluators.draw(rng);
        const int a = objects.draw(rng);
        const std::int64_t key = static_cast<std::int64_t>(i) * config.object_count + a;
        if (!seen.insert(key).second) continue;
        edges.emplace_back(i, a);
        evaluators.record(i);
        objects.record(a);
    }
    return edges;
}

inline std::vector<std::pair<int, int>> generate_topology(const SynthConfig& config) {
    std::mt19937_64 rng(config.seed);
    return generate_topology(config, rng);
}

// Rates every edge as intrinsic quality plus N(0, sigma_i) noise, clamped to
// [0,1]. Qualities and sigmas must already be drawn (see generate for the
// canonical draw order).
inline BipartiteRatingGraph assign_ratings(const std::vector<std::pair<int, int>>& skeleton,
                                           const SynthConfig& config,
                                           const SyntheticGroundTruth& truth,
                                           std::mt19937_64& rng) {
    std::vector<Edge> edges;
    edges.reserve(skeleton.size());
    std::normal_distribution<double> unit_normal(0.0, 1.0);
    for (const auto& [i, a] : skeleton) {
        const double noise = truth.evaluator_sigmas[i] > 0.0
                                 ? unit_normal(rng) * truth.evaluator_sigmas[i]
                                 : 0.0;
        const double r = std::clamp(truth.intrinsic_qualities[a] + noise, 0.0, 1.0);
        edges.emplace_back(i, a, r);
    }
    return BipartiteRatingGraph::from_edges(config.evaluator_count, config.object_count, edges);
}

// Full synthetic dataset from one seed. Draw order is fixed: intrinsic
// qualities, evaluator sigmas, topology, then per-edge noise, so the ground
// truth for a seed never depends on the topology.
inline SyntheticDataset generate(const SynthConfig& config) {
    config.validate();
    std::mt19937_64 rng(config.seed);
    SyntheticDataset data;
    data.truth.intrinsic_qualities.resize(config.object_count);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (double& q : data.truth.intrinsic_qualities) q = unit(rng);
    data.truth.evaluator_sigmas.resize(config.evaluator_count);
    std::uniform_real_distribution<double> sigma(config.delta_min, config.delta_max);
    for (double& s : data.truth.evaluator_sigmas)
        s = config.delta_min == config.delta_max ? config.delta_min : sigma(rng);
    const auto skeleton = generate_topology(config, rng);
    data.graph = assign_ratings(skeleton, config, data.truth, rng);
    return data;
}

// Top ceil(fraction * |O|) objects by intrinsic quality, ties broken by
// ascending object id.
inline std::vector<int> benchmark_objects(const SyntheticGroundTruth& truth, double fraction) {
    if (!(fraction > 0.0 && fraction < 1.0))
        throw std::invalid_argument("benchmark_objects: fraction must be in (0,1)");
    const int n = static_cast<int>(truth.intrinsic_qualities.size());
    const int m = static_cast<int>(std::ceil(fraction * n));
    std::vector<int> order(n);
    for (int a = 0; a < n; ++a) order[a] = a;
    std::sort(order.begin(), order.end(), [&](int a, int b) {
        if (truth.intrinsic_qualities[a] != truth.intrinsic_qualities[b])
            return truth.intrinsic_qualities[a] > truth.intrinsic_qualities[b];
        return a < b;
    });
    order.resize(std::min(m, n));
    std::sort(order.begin(), order.end());
    return order;
}

}  // namespace crct
