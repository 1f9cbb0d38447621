#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>

#include "crct/graph.hpp"
#include "crct/io.hpp"

using namespace crct;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = (std::filesystem::temp_directory_path() / name).string();
    std::ofstream out(path);
    out << content;
    return path;
}

}  // namespace

TEST_CASE("build_graph normalizes ratings with the affine map") {
    const RatingScale scale{1.0, 5.0, true};
    std::vector<RatingRecord> records = {
        {0, 0, 1.0, std::nullopt},
        {0, 1, 5.0, std::nullopt},
        {1, 0, 3.0, std::nullopt},
    };
    const auto g = build_graph(records, scale, 2, 2);
    CHECK(g.ratings_by(0)[0].second == 0.0);
    CHECK(g.ratings_by(0)[1].second == 1.0);
    CHECK(g.ratings_by(1)[0].second == 0.5);
}

TEST_CASE("build_graph rejects bad records by index") {
    const RatingScale scale{1.0, 5.0, true};
    CHECK_THROWS_WITH(build_graph({{5, 0, 3.0, std::nullopt}}, scale, 2, 2),
                      Catch::Matchers::ContainsSubstring("record 0"));
    CHECK_THROWS_WITH(build_graph({{0, 0, 3.0, std::nullopt}, {1, 7, 3.0, std::nullopt}}, scale,
                                  2, 2),
                      Catch::Matchers::ContainsSubstring("record 1"));
    CHECK_THROWS(build_graph({{0, 0, 9.0, std::nullopt}}, scale, 2, 2));
}

TEST_CASE("duplicate records keep the last occurrence and are counted") {
    const RatingScale scale{1.0, 5.0, true};
    IngestionReport report;
    const auto g = build_graph({{0, 0, 1.0, std::nullopt}, {0, 0, 5.0, std::nullopt}}, scale, 1,
                               1, &report);
    CHECK(g.edge_count() == 1);
    CHECK(g.ratings_by(0)[0].second == 1.0);
    CHECK(report.duplicate_records == 1);
}

TEST_CASE("degree sums match edge count") {
    std::mt19937_64 rng(7);
    std::vector<RatingRecord> records;
    std::set<std::pair<int, int>> seen;
    for (int n = 0; n < 60; ++n) {
        const int i = static_cast<int>(rng() % 10);
        const int a = static_cast<int>(rng() % 15);
        if (!seen.insert({i, a}).second) continue;
        records.push_back({i, a, static_cast<double>(1 + rng() % 5), std::nullopt});
    }
    const auto g = build_graph(records, RatingScale{1.0, 5.0, true}, 10, 15);
    std::size_t esum = 0, osum = 0;
    for (int i = 0; i < 10; ++i) esum += g.evaluator_degree(i);
    for (int a = 0; a < 15; ++a) osum += g.object_degree(a);
    CHECK(esum == g.edge_count());
    CHECK(osum == g.edge_count());
}

TEST_CASE("adjacency lists are transposes of each other") {
    const auto g = build_graph({{0, 1, 2.0, std::nullopt}, {1, 1, 4.0, std::nullopt},
                                {1, 0, 3.0, std::nullopt}},
                               RatingScale{1.0, 5.0, true}, 2, 2);
    std::set<std::tuple<int, int, double>> from_evaluators, from_objects;
    for (int i = 0; i < g.evaluator_count(); ++i)
        for (const auto& [a, r] : g.ratings_by(i)) from_evaluators.insert({i, a, r});
    for (int a = 0; a < g.object_count(); ++a)
        for (const auto& [i, r] : g.ratings_of(a)) from_objects.insert({i, a, r});
    CHECK(from_evaluators == from_objects);
}

TEST_CASE("normalization preserves rating order") {
    const RatingScale scale{1.0, 5.0, true};
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const double r1 = 1.0 + 4.0 * (rng() % 1000) / 1000.0;
        const double r2 = 1.0 + 4.0 * (rng() % 1000) / 1000.0;
        if (r1 < r2) CHECK(scale.normalize(r1) < scale.normalize(r2));
    }
}

TEST_CASE("degree_stats") {
    SECTION("single edge in a 2x2 graph") {
        const auto g = BipartiteRatingGraph::from_edges(2, 2, {{0, 0, 0.5}});
        const auto s = degree_stats(g);
        CHECK(s.sparsity == 0.25);
    }
    SECTION("complete bipartite graph has sparsity 1") {
        std::vector<Edge> edges;
        for (int i = 0; i < 3; ++i)
            for (int a = 0; a < 4; ++a) edges.emplace_back(i, a, 0.5);
        const auto g = BipartiteRatingGraph::from_edges(3, 4, edges);
        CHECK(degree_stats(g).sparsity == 1.0);
        CHECK(degree_stats(g).mean_evaluator_degree == 4.0);
        CHECK(degree_stats(g).mean_object_degree == 3.0);
    }
    SECTION("empty graph rejected") {
        const auto g = BipartiteRatingGraph::from_edges(2, 2, {});
        CHECK_THROWS(degree_stats(g));
    }
}

TEST_CASE("movielens loader filters by evaluator degree") {
    std::string lines;
    for (int k = 1; k <= 5; ++k)
        lines += "1\t" + std::to_string(k) + "\t3\t100\n";
    const auto path = write_temp("crct_ml_small.tsv", lines);

    SECTION("min_degree above count empties the result") {
        CHECK_THROWS_WITH(load_movielens(path, 20),
                          Catch::Matchers::ContainsSubstring("min_degree"));
    }
    SECTION("min_degree 0 keeps every line") {
        const auto loaded = load_movielens(path, 0);
        CHECK(loaded.graph.edge_count() == 5);
        CHECK(loaded.graph.evaluator_count() == 1);
        CHECK(loaded.graph.object_count() == 5);
        CHECK(loaded.evaluator_original_ids == std::vector<int>{1});
    }
}

TEST_CASE("movielens loader reports malformed lines") {
    const auto path = write_temp("crct_ml_bad.tsv", "1\t2\t3\t100\nnot a line\n");
    CHECK_THROWS_WITH(load_movielens(path, 0), Catch::Matchers::ContainsSubstring("line 2"));
}

TEST_CASE("movielens loader drops objects with no remaining ratings") {
    // evaluator 1 has 3 ratings, evaluator 2 has 1; filtering at 2 drops
    // evaluator 2 and its private object 9.
    const auto path = write_temp("crct_ml_filter.tsv",
                                 "1\t1\t3\t0\n1\t2\t4\t0\n1\t3\t5\t0\n2\t9\t1\t0\n");
    const auto loaded = load_movielens(path, 2);
    CHECK(loaded.graph.evaluator_count() == 1);
    CHECK(loaded.graph.object_count() == 3);
    CHECK(loaded.object_original_ids == std::vector<int>{1, 2, 3});
}

TEST_CASE("graph export round-trips the edge set exactly") {
    std::mt19937_64 rng(11);
    std::vector<Edge> edges;
    std::set<std::pair<int, int>> seen;
    for (int n = 0; n < 40; ++n) {
        const int i = static_cast<int>(rng() % 8);
        const int a = static_cast<int>(rng() % 9);
        if (!seen.insert({i, a}).second) continue;
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        edges.emplace_back(i, a, unit(rng));
    }
    const auto g = BipartiteRatingGraph::from_edges(8, 9, edges);
    const auto path = (std::filesystem::temp_directory_path() / "crct_roundtrip.csv").string();
    export_graph(g, path);
    const auto g2 = load_graph_csv(path);
    CHECK(g2.evaluator_count() == g.evaluator_count());
    CHECK(g2.object_count() == g.object_count());
    CHECK(g2.edges() == g.edges());
}

TEST_CASE("subsample_evaluators keeps a dense consistent subgraph") {
    std::vector<Edge> edges;
    for (int i = 0; i < 10; ++i)
        for (int a = 0; a < 5; ++a) edges.emplace_back(i, a, 0.1 * i);
    const auto g = BipartiteRatingGraph::from_edges(10, 5, edges);
    const auto sub = subsample_evaluators(g, 0.5, 99);
    CHECK(sub.graph.evaluator_count() == 5);
    CHECK(sub.graph.object_count() == 5);
    CHECK(sub.evaluator_original_ids.size() == 5);
    for (int dense = 0; dense < 5; ++dense) {
        const int orig = sub.evaluator_original_ids[dense];
        CHECK(sub.graph.ratings_by(dense).size() == g.ratings_by(orig).size());
    }
}
