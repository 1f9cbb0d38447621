#pragma once

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace crct {

// Native scale of raw ratings, e.g. [1,5] integer stars.
struct RatingScale {
    double min_value = 0.0;
    double max_value = 1.0;
    bool discrete = false;

    void validate() const {
        if (!(min_value < max_value))
            throw std::invalid_argument("RatingScale: min_value must be < max_value");
    }
    double normalize(double raw) const {
        return (raw - min_value) / (max_value - min_value);
    }
};

struct RatingRecord {
    int evaluator_id = 0;
    int object_id = 0;
    double raw_rating = 0.0;
    std::optional<std::int64_t> timestamp;  // ignored by all algorithms
};

// One (evaluator, object, rating) edge with the rating already in [0,1].
using Edge = std::tuple<int, int, double>;

// Immutable weighted evaluator-object bipartite network. Adjacency lists are
// sorted by counterpart id so set intersections run as linear merges.
class BipartiteRatingGraph {
public:
    BipartiteRatingGraph() = default;

    static BipartiteRatingGraph from_edges(int evaluator_count, int object_count,
                                           const std::vector<Edge>& edges) {
        if (evaluator_count <= 0 || object_count <= 0)
            throw std::invalid_argument("graph: node counts must be positive");
        BipartiteRatingGraph g;
        g.evaluator_count_ = evaluator_count;
        g.object_count_ = object_count;
        g.evaluator_adj_.resize(evaluator_count);
        g.object_adj_.resize(object_count);
        for (const auto& [i, a, r] : edges) {
            if (i < 0 || i >= evaluator_count)
                throw std::invalid_argument("graph: evaluator id " + std::to_string(i) +
                                            " out of bounds");
            if (a < 0 || a >= object_count)
                throw std::invalid_argument("graph: object id " + std::to_string(a) +
                                            " out of bounds");
            if (r < 0.0 || r > 1.0)
                throw std::invalid_argument("graph: rating " + std::to_string(r) +
                                            " outside [0,1]");
            g.evaluator_adj_[i].emplace_back(a, r);
            g.object_adj_[a].emplace_back(i, r);
        }
        for (auto& adj : g.evaluator_adj_) std::sort(adj.begin(), adj.end());
        for (auto& adj : g.object_adj_) std::sort(adj.begin(), adj.end());
        for (const auto& adj : g.evaluator_adj_)
            for (std::size_t k = 1; k < adj.size(); ++k)
                if (adj[k].first == adj[k - 1].first)
                    throw std::invalid_argument("graph: duplicate (evaluator, object) pair");
        g.edge_count_ = edges.size();
        return g;
    }

    int evaluator_count() const { return evaluator_count_; }
    int object_count() const { return object_count_; }
    std::size_t edge_count() const { return edge_count_; }

    int evaluator_degree(int i) const { return static_cast<int>(evaluator_adj_[i].size()); }
    int object_degree(int a) const { return static_cast<int>(object_adj_[a].size()); }

    // (object_id, rating) pairs sorted by object id.
    const std::vector<std::pair<int, double>>& ratings_by(int evaluator) const {
        return evaluator_adj_[evaluator];
    }
    // (evaluator_id, rating) pairs sorted by evaluator id.
    const std::vector<std::pair<int, double>>& ratings_of(int object) const {
        return object_adj_[object];
    }

    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(edge_count_);
        for (int i = 0; i < evaluator_count_; ++i)
            for (const auto& [a, r] : evaluator_adj_[i]) out.emplace_back(i, a, r);
        return out;
    }

private:
    int evaluator_count_ = 0;
    int object_count_ = 0;
    std::size_t edge_count_ = 0;
    std::vector<std::vector<std::pair<int, double>>> evaluator_adj_;
    std::vector<std::vector<std::pair<int, double>>> object_adj_;
};

struct IngestionReport {
    std::size_t duplicate_records = 0;  // re-ratings resolved by keep-last
};

// Builds a graph from raw records, normalizing ratings to [0,1] via the
// affine map (r - min) / (max - min). Duplicate (evaluator, object) records
// keep the last occurrence.
inline BipartiteRatingGraph build_graph(const std::vector<RatingRecord>& records,
                                        const RatingScale& scale, int evaluator_count,
                                        int object_count,
                                        IngestionReport* report = nullptr) {
    scale.validate();
    std::unordered_map<std::int64_t, double> last;
    last.reserve(records.size());
    std::vector<std::int64_t> order;
    order.reserve(records.size());
    std::size_t duplicates = 0;
    for (std::size_t n = 0; n < records.size(); ++n) {
        const auto& rec = records[n];
        if (rec.evaluator_id < 0 || rec.evaluator_id >= evaluator_count)
            throw std::invalid_argument("build_graph: record " + std::to_string(n) +
                                        " evaluator id " + std::to_string(rec.evaluator_id) +
                                        " out of bounds");
        if (rec.object_id < 0 || rec.object_id >= object_count)
            throw std::invalid_argument("build_graph: record " + std::to_string(n) +
                                        " object id " + std::to_string(rec.object_id) +
                                        " out of bounds");
        if (rec.raw_rating < scale.min_value || rec.raw_rating > scale.max_value)
            throw std::invalid_argument("build_graph: record " + std::to_string(n) +
                                        " rating " + std::to_string(rec.raw_rating) +
                                        " outside declared scale");
        const std::int64_t key =
            static_cast<std::int64_t>(rec.evaluator_id) * object_count + rec.object_id;
        auto [it, inserted] = last.insert_or_assign(key, scale.normalize(rec.raw_rating));
        if (inserted)
            order.push_back(key);
        else
            ++duplicates;
    }
    std::vector<Edge> edges;
    edges.reserve(order.size());
    for (std::int64_t key : order) {
        const int i = static_cast<int>(key / object_count);
        const int a = static_cast<int>(key % object_count);
        edges.emplace_back(i, a, last.at(key));
    }
    if (report) report->duplicate_records = duplicates;
    return BipartiteRatingGraph::from_edges(evaluator_count, object_count, edges);
}

struct DegreeStats {
    double mean_evaluator_degree = 0.0;
    double mean_object_degree = 0.0;
    double sparsity = 0.0;
};

inline DegreeStats degree_stats(const BipartiteRatingGraph& g) {
    if (g.edge_count() == 0) throw std::invalid_argument("degree_stats: empty graph");
    DegreeStats s;
    s.mean_evaluator_degree = static_cast<double>(g.edge_count()) / g.evaluator_count();
    s.mean_object_degree = static_cast<double>(g.edge_count()) / g.object_count();
    s.sparsity = static_cast<double>(g.edge_count()) /
                 (static_cast<double>(g.evaluator_count()) * g.object_count());
    return s;
}

// Result of loading a real rating file: graph plus the dense-id -> original-id
// maps produced by the degree filter.
struct LoadedGraph {
    BipartiteRatingGraph graph;
    std::vector<int> evaluator_original_ids;  // dense id -> original id
    std::vector<int> object_original_ids;
    IngestionReport report;
};

// Loads the tab-separated `user item rating timestamp` format (1-indexed ids,
// integer 1..5 ratings), keeping only evaluators with at least min_degree
// ratings and dropping objects left with none.
inline LoadedGraph load_movielens(const std::string& path, int min_degree = 20) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("load_movielens: cannot open " + path);
    std::vector<std::tuple<int, int, double>> raw;  // original ids, raw rating
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        std::istringstream ss(line);
        long user, item, ts;
        double rating;
        if (!(ss >> user >> item >> rating >> ts))
            throw std::runtime_error("load_movielens: malformed line " +
                                     std::to_string(lineno) + " in " + path);
        if (user < 1 || item < 1)
            throw std::runtime_error("load_movielens: non-positive id at line " +
                                     std::to_string(lineno));
        raw.emplace_back(static_cast<int>(user), static_cast<int>(item), rating);
    }
    std::unordered_map<int, int> evaluator_counts;
    for (const auto& [u, it_, r] : raw) ++evaluator_counts[u];

    std::unordered_map<int, int> evaluator_dense, object_dense;
    LoadedGraph out;
    std::vector<RatingRecord> records;
    records.reserve(raw.size());
    for (const auto& [u, item, r] : raw) {
        if (evaluator_counts[u] < min_degree) continue;
        auto [ue, enew] = evaluator_dense.try_emplace(u, static_cast<int>(evaluator_dense.size()));
        if (enew) out.evaluator_original_ids.push_back(u);
        auto [oe, onew] = object_dense.try_emplace(item, static_cast<int>(object_dense.size()));
        if (onew) out.object_original_ids.push_back(item);
        records.push_back({ue->second, oe->second, r, std::nullopt});
    }
    if (records.empty())
        throw std::runtime_error("load_movielens: no evaluators left after min_degree=" +
                                 std::to_string(min_degree) + " filter");
    RatingScale scale{1.0, 5.0, true};
    out.graph = build_graph(records, scale, static_cast<int>(evaluator_dense.size()),
                            static_cast<int>(object_dense.size()), &out.report);
    return out;
}

// Keeps a uniform fraction of evaluators (at least one), re-indexing densely
// and dropping objects left without ratings. Used for subsampling large real
// data sets.
inline LoadedGraph subsample_evaluators(const BipartiteRatingGraph& g, double fraction,
                                        std::uint64_t seed) {
    if (!(fraction > 0.0 && fraction <= 1.0))
        throw std::invalid_argument("subsample_evaluators: fraction must be in (0,1]");
    std::vector<int> keep(g.evaluator_count());
    for (int i = 0; i < g.evaluator_count(); ++i) keep[i] = i;
    const std::size_t count = std::max<std::size_t>(
        1, static_cast<std::size_t>(fraction * g.evaluator_count() + 0.5));
    std::mt19937_64 rng(seed);
    for (std::size_t t = 0; t < count; ++t) {
        std::uniform_int_distribution<std::size_t> pick(t, keep.size() - 1);
        std::swap(keep[t], keep[pick(rng)]);
    }
    keep.resize(count);
    std::sort(keep.begin(), keep.end());

    LoadedGraph out;
    std::vector<int> object_dense(g.object_count(), -1);
    std::vector<Edge> edges;
    for (std::size_t dense = 0; dense < keep.size(); ++dense) {
        const int orig = keep[dense];
        out.evaluator_original_ids.push_back(orig);
        for (const auto& [a, r] : g.ratings_by(orig)) {
            if (object_dense[a] < 0) {
                object_dense[a] = static_cast<int>(out.object_original_ids.size());
                out.object_original_ids.push_back(a);
            }
            edges.emplace_back(static_cast<int>(dense), object_dense[a], r);
        }
    }
    out.graph = BipartiteRatingGraph::from_edges(static_cast<int>(keep.size()),
                                                 static_cast<int>(out.object_original_ids.size()),
                                                 edges);
    return out;
}

}  // namespace crct
