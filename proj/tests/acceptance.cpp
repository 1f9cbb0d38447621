// Acceptance suite: one pass/fail line per criterion.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "crct/attack.hpp"
#include "crct/clustering.hpp"
#include "crct/experiment.hpp"
#include "crct/graph.hpp"
#include "crct/metrics.hpp"
#include "crct/reputation.hpp"
#include "crct/synthgen.hpp"

using namespace crct;
namespace fs = std::filesystem;

namespace {

struct Check {
    bool ok = true;
    std::vector<std::string> messages;

    void expect(bool condition, const std::string& message) {
        if (!condition) {
            ok = false;
            messages.push_back(message);
        }
    }
};

int failures = 0;

void run_criterion(int number, const std::string& name,
                   const std::function<void(Check&)>& body) {
    Check check;
    try {
        body(check);
    } catch (const std::exception& e) {
        check.ok = false;
        check.messages.push_back(std::string("exception: ") + e.what());
    }
    if (check.ok) {
        std::cout << "[PASS] criterion " << number << ": " << name << "\n";
    } else {
        ++failures;
        std::cout << "[FAIL] criterion " << number << ": " << name << "\n";
        for (const auto& m : check.messages) std::cout << "       " << m << "\n";
    }
}

void skip_criterion(int number, const std::string& name, const std::string& reason) {
    std::cout << "[SKIP] criterion " << number << ": " << name << " (" << reason << ")\n";
}

std::string movielens_path() {
    if (const char* env = std::getenv("ML100K_PATH")) return env;
    for (const char* candidate : {"data/ml-100k/u.data", "data/u.data", "u.data"})
        if (fs::exists(candidate)) return candidate;
    return {};
}

SynthConfig desk_config(std::uint64_t seed) {
    SynthConfig config;
    config.evaluator_count = 600;
    config.object_count = 400;
    config.sparsity = 0.02;
    config.seed = seed;
    return config;
}

double brute_kendall(const std::vector<double>& x, const std::vector<double>& y) {
    long long sum = 0;
    const std::size_t n = x.size();
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b) {
            const double prod = (x[a] - x[b]) * (y[a] - y[b]);
            if (prod > 0) ++sum;
            else if (prod < 0) --sum;
        }
    return static_cast<double>(sum) / (static_cast<double>(n) * (n - 1) / 2);
}

double tau_vs_intrinsic(const BipartiteRatingGraph& graph, const ReputationState& state,
                        const SyntheticGroundTruth& truth) {
    std::vector<double> est, intrinsic;
    for (int a = 0; a < graph.object_count(); ++a) {
        if (std::isnan(state.qualities[a])) continue;
        est.push_back(state.qualities[a]);
        intrinsic.push_back(truth.intrinsic_qualities[a]);
    }
    return kendall_tau(est, intrinsic);
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void criterion1(Check& check) {
    // Penalty-reward map.
    for (double beta : {1.0, 2.0, 3.0, 6.0}) {
        check.expect(penalty_reward(0.0, beta) == 0.0, "f(0) != 0");
        check.expect(penalty_reward(0.5, beta) == 0.5, "f(0.5) != 0.5");
        check.expect(penalty_reward(1.0, beta) == 1.0, "f(1) != 1");
    }
    check.expect(std::abs(penalty_reward(0.8, 2.0) - 16.0 / 17.0) < 1e-12,
                 "f(0.8, beta=2) != 16/17");
    {
        std::mt19937_64 rng(101);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (int k = 0; k < 10000; ++k) {
            const double x = unit(rng);
            if (std::abs(penalty_reward(x, 1.0) - x) > 1e-15) {
                check.expect(false, "beta=1 not the identity at x=" + std::to_string(x));
                break;
            }
        }
    }
    // Kendall tau vs O(n^2) brute force.
    {
        std::mt19937_64 rng(102);
        bool all_equal = true;
        for (int trial = 0; trial < 1000 && all_equal; ++trial) {
            const std::size_t n = 2 + rng() % 199;
            std::vector<double> x(n), y(n);
            std::uniform_int_distribution<int> grid(0, 12);
            for (std::size_t i = 0; i < n; ++i) {
                x[i] = grid(rng) / 12.0;
                y[i] = grid(rng) / 12.0;
            }
            all_equal = kendall_tau(x, y) == brute_kendall(x, y);
        }
        check.expect(all_equal, "kendall_tau mismatch with brute force");
    }
    // Exact AUC vs enumeration.
    {
        std::mt19937_64 rng(103);
        bool all_equal = true;
        for (int trial = 0; trial < 200 && all_equal; ++trial) {
            std::vector<double> high(1 + rng() % 60), low(1 + rng() % 40);
            std::uniform_int_distribution<int> grid(0, 10);
            for (double& v : high) v = grid(rng) / 10.0;
            for (double& v : low) v = grid(rng) / 10.0;
            double credit = 0.0;
            for (double h : high)
                for (double l : low) credit += h > l ? 1.0 : (h == l ? 0.5 : 0.0);
            all_equal = auc_exact(high, low) == credit / (high.size() * low.size());
        }
        check.expect(all_equal, "auc_exact mismatch with enumeration");
    }
    // Clustering profile vs set-based brute force.
    {
        std::mt19937_64 rng(104);
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        bool all_equal = true;
        for (int trial = 0; trial < 30 && all_equal; ++trial) {
            const int evaluators = 2 + static_cast<int>(rng() % 49);
            const int objects = 2 + static_cast<int>(rng() % 25);
            std::vector<Edge> edges;
            for (int i = 0; i < evaluators; ++i)
                for (int a = 0; a < objects; ++a)
                    if (unit(rng) < 0.2) edges.emplace_back(i, a, unit(rng));
            const auto g = BipartiteRatingGraph::from_edges(evaluators, objects, edges);
            const auto fast = compute_profile(g);

            std::vector<std::set<int>> rated(evaluators);
            for (int i = 0; i < evaluators; ++i)
                for (const auto& [a, r] : g.ratings_by(i)) rated[i].insert(a);
            for (int i = 0; i < evaluators && all_equal; ++i) {
                std::set<int> co;
                for (int a : rated[i])
                    for (const auto& [j, r] : g.ratings_of(a))
                        if (j != i) co.insert(j);
                double expected = 0.0;
                for (int j : co) {
                    std::vector<int> inter;
                    std::set_intersection(rated[i].begin(), rated[i].end(), rated[j].begin(),
                                          rated[j].end(), std::back_inserter(inter));
                    const std::size_t uni = rated[i].size() + rated[j].size() - inter.size();
                    expected += static_cast<double>(inter.size()) / uni;
                }
                if (!co.empty()) expected /= co.size();
                all_equal = fast.cc[i] == expected;
            }
        }
        check.expect(all_equal, "compute_profile mismatch with brute force");
    }
}

void criterion2(Check& check) {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const auto data = generate(desk_config(1000 + seed));
        const auto profile = compute_profile(data.graph);
        const auto crc = run_engine(data.graph, {Variant::CRC, 2.0}, {}, &profile);
        const auto crct1 = run_engine(data.graph, {Variant::CRCT, 1.0}, {}, &profile);
        for (std::size_t i = 0; i < crc.reputations.size(); ++i)
            if (std::abs(crc.reputations[i] - crct1.reputations[i]) > 1e-12) {
                check.expect(false, "seed " + std::to_string(seed) + ": reputation " +
                                        std::to_string(i) + " differs");
                return;
            }
    }
}

void criterion3(Check& check) {
    auto config = desk_config(42);
    config.delta_min = 0.0;
    config.delta_max = 0.0;
    const auto data = generate(config);
    const auto state = run_engine(data.graph, {Variant::CR, 2.0});
    check.expect(state.converged, "CR engine did not converge on noise-free data");
    check.expect(tau_vs_intrinsic(data.graph, state, data.truth) == 1.0,
                 "tau(estimated, intrinsic) != 1 on noise-free data");
}

struct SweepMeans {
    // [method][cell] mean over seeds
    std::vector<std::vector<double>> auc, tau;
};

void criterion4(Check& check) {
    const std::vector<double> ps = {0.1, 0.3, 0.5};
    const std::vector<Method> methods = {
        {Variant::CR, 2.0}, {Variant::CRC, 2.0}, {Variant::CRCT, 2.0}};
    SweepMeans means;
    means.auc.assign(methods.size(), std::vector<double>(ps.size(), 0.0));
    means.tau.assign(methods.size(), std::vector<double>(ps.size(), 0.0));
    const int seeds = 10;
    for (int seed = 0; seed < seeds; ++seed) {
        const auto data = generate(desk_config(2000 + seed));
        const auto bench = benchmark_objects(data.truth, 0.05);
        for (std::size_t ci = 0; ci < ps.size(); ++ci) {
            const auto attacked =
                distort_links(data.graph, SpamKind::Random, ps[ci], 3000 + seed * 10 + ci);
            const auto profile = compute_profile(attacked.graph);
            for (std::size_t mi = 0; mi < methods.size(); ++mi) {
                const auto state = run_engine(attacked.graph, methods[mi], {}, &profile);
                means.auc[mi][ci] += auc_objects(state.qualities, bench) / seeds;
                means.tau[mi][ci] += tau_vs_intrinsic(attacked.graph, state, data.truth) / seeds;
            }
        }
    }
    for (std::size_t mi = 0; mi < methods.size(); ++mi) {
        const std::string name = variant_name(methods[mi].variant);
        for (std::size_t ci = 1; ci < ps.size(); ++ci) {
            check.expect(means.auc[mi][ci] <= means.auc[mi][ci - 1] + 1e-12,
                         name + ": AUC increased from p=" + std::to_string(ps[ci - 1]) +
                             " to p=" + std::to_string(ps[ci]));
            check.expect(means.tau[mi][ci] <= means.tau[mi][ci - 1] + 1e-12,
                         name + ": tau increased from p=" + std::to_string(ps[ci - 1]) +
                             " to p=" + std::to_string(ps[ci]));
        }
    }
    for (std::size_t ci = 0; ci < ps.size(); ++ci)
        check.expect(means.auc[2][ci] >= means.auc[0][ci],
                     "AUC(CRCT) < AUC(CR) at p=" + std::to_string(ps[ci]));
    check.expect(means.auc[2][2] - means.auc[0][2] >= means.auc[2][0] - means.auc[0][0],
                 "CRCT-CR AUC gap does not widen at p=0.5");
}

void criterion5(Check& check) {
    const std::vector<double> betas = {1.0, 2.0, 3.0};
    std::vector<double> tau_means(betas.size(), 0.0);
    const int seeds = 10;
    for (int seed = 0; seed < seeds; ++seed) {
        const auto data = generate(desk_config(4000 + seed));
        const auto attacked =
            corrupt_evaluators_synthetic(data.graph, SpamKind::Random, 0.6, 5000 + seed);
        const auto profile = compute_profile(attacked.graph);
        for (std::size_t bi = 0; bi < betas.size(); ++bi) {
            const auto state =
                run_engine(attacked.graph, {Variant::CRCT, betas[bi]}, {}, &profile);
            tau_means[bi] += tau_vs_intrinsic(attacked.graph, state, data.truth) / seeds;
        }
    }
    std::ostringstream detail;
    detail << "tau means: beta1=" << tau_means[0] << " beta2=" << tau_means[1]
           << " beta3=" << tau_means[2];
    check.expect(tau_means[1] >= tau_means[0], "tau(beta=2) < tau(beta=1); " + detail.str());
    check.expect(tau_means[1] >= tau_means[2], "tau(beta=2) < tau(beta=3); " + detail.str());
}

struct MovieLensAverages {
    // [method] means over realizations
    std::vector<double> auc, rs;
    // [method][L index] recall means; L grid in units of d
    std::vector<std::vector<double>> recall;
};

MovieLensAverages movielens_sweep(const BipartiteRatingGraph& graph, SpamKind kind,
                                  const std::vector<double>& L_over_d) {
    const std::vector<Method> methods = {
        {Variant::CR, 2.0}, {Variant::CRC, 2.0}, {Variant::CRCT, 2.0}};
    const int realizations = 10;
    MovieLensAverages avg;
    avg.auc.assign(methods.size(), 0.0);
    avg.rs.assign(methods.size(), 0.0);
    avg.recall.assign(methods.size(), std::vector<double>(L_over_d.size(), 0.0));
    const RatingScale scale{1.0, 5.0, true};
    for (int r = 0; r < realizations; ++r) {
        const auto attacked = corrupt_evaluators_real(
            graph, kind, 0.05, 0.05, scale,
            stable_hash("ml;" + spam_kind_name(kind) + ";r=" + std::to_string(r)));
        const auto profile = compute_profile(attacked.graph);
        const int d = static_cast<int>(attacked.spammer_ids.size());
        for (std::size_t mi = 0; mi < methods.size(); ++mi) {
            const auto state = run_engine(attacked.graph, methods[mi], {}, &profile);
            const auto ranked = rank_evaluators(state);
            avg.auc[mi] += auc_evaluators(state.reputations, attacked.spammer_ids) / realizations;
            avg.rs[mi] += ranking_score(ranked, attacked.spammer_ids) / realizations;
            for (std::size_t li = 0; li < L_over_d.size(); ++li) {
                const int L = std::min(graph.evaluator_count(),
                                       static_cast<int>(round_half_up(L_over_d[li] * d)));
                avg.recall[mi][li] += recall_at(ranked, attacked.spammer_ids, L) / realizations;
            }
        }
    }
    return avg;
}

void criterion6(Check& check, const BipartiteRatingGraph& graph) {
    check.expect(graph.evaluator_count() == 943,
                 "|E| = " + std::to_string(graph.evaluator_count()) + ", expected 943");
    check.expect(graph.object_count() == 1682,
                 "|O| = " + std::to_string(graph.object_count()) + ", expected 1682");

    const auto random = movielens_sweep(graph, SpamKind::Random, {2.0});
    const auto malicious = movielens_sweep(graph, SpamKind::MaliciousMixed, {2.0});

    auto near = [&](double got, double want, const std::string& what) {
        std::ostringstream ss;
        ss << what << ": got " << got << ", expected " << want << " +/- 0.02";
        check.expect(std::abs(got - want) <= 0.02, ss.str());
    };
    // Random spammers (CR, CRC, CRCT indices 0,1,2)
    near(random.auc[0], 0.9183, "random AUC CR");
    near(random.auc[1], 0.9236, "random AUC CRC");
    near(random.auc[2], 0.9252, "random AUC CRCT");
    near(random.rs[0], 0.0846, "random RS CR");
    near(random.rs[2], 0.0780, "random RS CRCT");
    // Malicious spammers
    near(malicious.auc[0], 0.9127, "malicious AUC CR");
    near(malicious.auc[2], 0.9253, "malicious AUC CRCT");
    near(malicious.rs[2], 0.0806, "malicious RS CRCT");
    // Orderings must hold exactly on the means.
    for (const auto* avg : {&random, &malicious}) {
        check.expect(avg->auc[0] < avg->auc[1] && avg->auc[1] < avg->auc[2],
                     "AUC ordering CR < CRC < CRCT violated");
        check.expect(avg->rs[0] > avg->rs[1] && avg->rs[1] > avg->rs[2],
                     "RS ordering CR > CRC > CRCT violated");
    }
}

void criterion7(Check& check, const BipartiteRatingGraph& graph) {
    const std::vector<double> L_over_d = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0};
    for (SpamKind kind : {SpamKind::Random, SpamKind::MaliciousMixed}) {
        const auto avg = movielens_sweep(graph, kind, L_over_d);
        for (std::size_t mi = 0; mi < avg.recall.size(); ++mi)
            for (std::size_t li = 1; li < L_over_d.size(); ++li)
                check.expect(avg.recall[mi][li] >= avg.recall[mi][li - 1] - 1e-12,
                             spam_kind_name(kind) + ": recall decreased in L for method " +
                                 std::to_string(mi));
        // L = 2d is index 3
        check.expect(avg.recall[2][3] >= avg.recall[0][3],
                     spam_kind_name(kind) + ": recall(CRCT) < recall(CR) at L=2d");
    }
}

void criterion8(Check& check) {
    nlohmann::json raw = {
        {"data",
         {{"type", "synthetic"},
          {"evaluator_count", 200},
          {"object_count", 120},
          {"sparsity", 0.05}}},
        {"methods",
         nlohmann::json::array(
             {{{"variant", "CR"}}, {{"variant", "CRC"}}, {{"variant", "CRCT"}, {"beta", 2}}})},
        {"attack", {{"kind", "random"}, {"mode", "evaluator_fraction"}, {"rho", {0.3}}}},
        {"realizations", 3},
        {"base_seed", 99},
    };
    auto cfg = parse_experiment_config(raw);
    cfg.output_dir = (fs::temp_directory_path() / "crct_accept_a").string();
    const auto s1 = run_experiment(cfg, 1);
    cfg.output_dir = (fs::temp_directory_path() / "crct_accept_b").string();
    const auto s2 = run_experiment(cfg, 3);
    check.expect(s1.failed_cells == 0 && s2.failed_cells == 0, "experiment cells failed");
    check.expect(slurp(s1.per_realization_path) == slurp(s2.per_realization_path),
                 "per-realization output not byte-identical across reruns");
    check.expect(slurp(s1.aggregate_path) == slurp(s2.aggregate_path),
                 "aggregate output not byte-identical across reruns");

    // In-loop range and termination invariants on a fresh engine run.
    const auto data = generate(desk_config(77));
    const auto attacked = corrupt_evaluators_synthetic(data.graph, SpamKind::Random, 0.4, 7);
    bool ranges_ok = true;
    EngineParams params;
    const auto state = run_engine(attacked.graph, {Variant::CRCT, 2.0}, params, nullptr,
                                  [&](const ReputationState& s) {
                                      for (double r : s.reputations)
                                          ranges_ok = ranges_ok && r >= 0.0 && r <= 1.0;
                                      for (double q : s.qualities)
                                          ranges_ok =
                                              ranges_ok && (std::isnan(q) || (q >= 0.0 && q <= 1.0));
                                  });
    check.expect(ranges_ok, "reputation or quality left [0,1] during iteration");
    check.expect(state.iteration <= params.max_iterations, "iteration cap exceeded");
    check.expect(state.converged || state.iteration == params.max_iterations,
                 "terminated without converging or exhausting the cap");
}

}  // namespace

int main() {
    run_criterion(1, "formula oracles", criterion1);
    run_criterion(2, "CRCT(beta=1) equals CRC", criterion2);
    run_criterion(3, "noise-free recovery", criterion3);
    run_criterion(4, "robustness ordering under link spam", criterion4);
    run_criterion(5, "beta sweep favors beta=2", criterion5);

    const auto ml_path = movielens_path();
    if (ml_path.empty()) {
        skip_criterion(6, "MovieLens AUC/RS reproduction",
                       "MovieLens-100k u.data not found; set ML100K_PATH");
        skip_criterion(7, "MovieLens recall curve shape",
                       "MovieLens-100k u.data not found; set ML100K_PATH");
    } else {
        const auto graph = load_movielens(ml_path, 20).graph;
        run_criterion(6, "MovieLens AUC/RS reproduction",
                      [&](Check& c) { criterion6(c, graph); });
        run_criterion(7, "MovieLens recall curve shape",
                      [&](Check& c) { criterion7(c, graph); });
    }

    run_criterion(8, "determinism and invariant suite", criterion8);

    if (failures > 0) {
        std::cout << failures << " criterion(s) failed\n";
        return 1;
    }
    std::cout << "all runnable criteria passed\n";
    return 0;
}
