#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "crct/attack.hpp"
#include "crct/clustering.hpp"
#include "crct/graph.hpp"
#include "crct/io.hpp"
#include "crct/metrics.hpp"
#include "crct/reputation.hpp"
#include "crct/synthgen.hpp"

namespace crct {

// FNV-1a, used to derive per-cell seeds from stable textual keys. Adding a
// grid point never changes the seed of any existing cell.
inline std::uint64_t stable_hash(const std::string& s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

enum class AttackMode { None, LinkFraction, EvaluatorFraction };

struct DataSourceConfig {
    bool synthetic = true;
    SynthConfig synth;
    std::string path;
    std::string format = "movielens";  // or "csv"
    int min_degree = 20;
    double sample_fraction = 1.0;
};

struct AttackSweep {
    SpamKind kind = SpamKind::Random;
    AttackMode mode = AttackMode::None;
    std::vector<double> p;      // link_fraction grid
    std::vector<double> rho;    // evaluator_fraction grid
    std::vector<double> omega;  // evaluator_fraction grid, real data only
};

struct ExperimentConfig {
    DataSourceConfig data;
    std::vector<Method> methods;
    AttackSweep attack;
    double benchmark_fraction = 0.05;
    std::vector<int> L;            // explicit detection-list lengths
    std::vector<double> L_over_d;  // lengths as multiples of the spammer count
    EngineParams engine;
    int realizations = 10;
    std::uint64_t base_seed = 0;
    std::string output_dir = "out";
};

namespace cfgdetail {

template <typename T>
T require(const nlohmann::json& j, const std::string& key) {
    if (!j.contains(key))
        throw std::invalid_argument("config: missing key '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw std::invalid_argument("config: key '" + key + "' has the wrong type");
    }
}

template <typename T>
T optional_or(const nlohmann::json& j, const std::string& key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
        throw std::invalid_argument("config: key '" + key + "' has the wrong type");
    }
}

inline std::vector<double> number_list(const nlohmann::json& j, const std::string& key) {
    const auto& v = j.at(key);
    std::vector<double> out;
    if (v.is_number()) {
        out.push_back(v.get<double>());
    } else if (v.is_array()) {
        for (const auto& e : v) {
            if (!e.is_number())
                throw std::invalid_argument("config: key '" + key + "' must hold numbers");
            out.push_back(e.get<double>());
        }
    } else {
        throw std::invalid_argument("config: key '" + key + "' must be a number or array");
    }
    if (out.empty()) throw std::invalid_argument("config: key '" + key + "' is empty");
    return out;
}

}  // namespace cfgdetail

inline ExperimentConfig parse_experiment_config(const nlohmann::json& j) {
    using namespace cfgdetail;
    ExperimentConfig cfg;

    const auto& data = j.contains("data") ? j.at("data") : throw std::invalid_argument(
                                                               "config: missing key 'data'");
    const std::string type = require<std::string>(data, "type");
    if (type == "synthetic") {
        cfg.data.synthetic = true;
        cfg.data.synth.evaluator_count = optional_or(data, "evaluator_count", 6000);
        cfg.data.synth.object_count = optional_or(data, "object_count", 4000);
        cfg.data.synth.sparsity = optional_or(data, "sparsity", 0.02);
        cfg.data.synth.delta_min = optional_or(data, "delta_min", 0.1);
        cfg.data.synth.delta_max = optional_or(data, "delta_max", 0.5);
        cfg.data.synth.validate();
    } else if (type == "file") {
        cfg.data.synthetic = false;
        cfg.data.path = require<std::string>(data, "path");
        cfg.data.format = optional_or<std::string>(data, "format", "movielens");
        if (cfg.data.format != "movielens" && cfg.data.format != "csv")
            throw std::invalid_argument("config: data.format must be 'movielens' or 'csv'");
        cfg.data.min_degree = optional_or(data, "min_degree", 20);
        cfg.data.sample_fraction = optional_or(data, "sample_fraction", 1.0);
    } else {
        throw std::invalid_argument("config: data.type must be 'synthetic' or 'file'");
    }

    if (!j.contains("methods") || !j.at("methods").is_array() || j.at("methods").empty())
        throw std::invalid_argument("config: 'methods' must be a non-empty array");
    for (const auto& m : j.at("methods")) {
        const Variant variant = parse_variant(require<std::string>(m, "variant"));
        if (m.contains("beta")) {
            for (double beta : number_list(m, "beta")) {
                Method method{variant, beta};
                method.validate();
                cfg.methods.push_back(method);
            }
        } else {
            cfg.methods.push_back({variant, 2.0});
        }
    }

    if (j.contains("attack") && !j.at("attack").is_null()) {
        const auto& atk = j.at("attack");
        cfg.attack.kind = parse_spam_kind(require<std::string>(atk, "kind"));
        const std::string mode = require<std::string>(atk, "mode");
        if (mode == "link_fraction") {
            cfg.attack.mode = AttackMode::LinkFraction;
            cfg.attack.p = number_list(atk, "p");
            for (double p : cfg.attack.p)
                if (p < 0.0 || p > 1.0)
                    throw std::invalid_argument("config: attack.p values must be in [0,1]");
        } else if (mode == "evaluator_fraction") {
            cfg.attack.mode = AttackMode::EvaluatorFraction;
            cfg.attack.rho = number_list(atk, "rho");
            for (double r : cfg.attack.rho)
                if (r < 0.0 || r > 1.0)
                    throw std::invalid_argument("config: attack.rho values must be in [0,1]");
            if (atk.contains("omega")) {
                cfg.attack.omega = number_list(atk, "omega");
                for (double w : cfg.attack.omega)
                    if (!(w > 0.0 && w <= 1.0))
                        throw std::invalid_argument("config: attack.omega values must be in (0,1]");
            }
            if (!cfg.data.synthetic && cfg.attack.omega.empty())
                throw std::invalid_argument(
                    "config: evaluator_fraction attacks on file data require 'omega'");
        } else {
            throw std::invalid_argument(
                "config: attack.mode must be 'link_fraction' or 'evaluator_fraction'");
        }
    }

    cfg.benchmark_fraction = optional_or(j, "benchmark_fraction", 0.05);
    if (j.contains("L"))
        for (double v : cfgdetail::number_list(j, "L")) cfg.L.push_back(static_cast<int>(v));
    if (j.contains("L_over_d")) cfg.L_over_d = cfgdetail::number_list(j, "L_over_d");
    cfg.engine.convergence_threshold = optional_or(j, "convergence_threshold", 1e-6);
    cfg.engine.max_iterations = optional_or(j, "max_iterations", 1000);
    cfg.engine.validate();
    cfg.realizations = optional_or(j, "realizations", 10);
    if (cfg.realizations < 1)
        throw std::invalid_argument("config: realizations must be >= 1");
    cfg.base_seed = optional_or<std::uint64_t>(j, "base_seed", 0);
    cfg.output_dir = optional_or<std::string>(j, "output_dir", "out");
    return cfg;
}

inline ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config: invalid JSON in " + path + ": " + e.what());
    }
    return parse_experiment_config(j);
}

// One attack-parameter grid cell; methods and L values vary within a cell so
// every method sees the identical attacked graph.
struct ExperimentCell {
    AttackMode mode = AttackMode::None;
    SpamKind kind = SpamKind::Random;
    double p = std::numeric_limits<double>::quiet_NaN();
    double rho = std::numeric_limits<double>::quiet_NaN();
    double omega = std::numeric_limits<double>::quiet_NaN();

    std::string key() const {
        std::ostringstream ss;
        ss << "mode=" << static_cast<int>(mode) << ";kind=" << spam_kind_name(kind);
        if (!std::isnan(p)) ss << ";p=" << p;
        if (!std::isnan(rho)) ss << ";rho=" << rho;
        if (!std::isnan(omega)) ss << ";omega=" << omega;
        return ss.str();
    }
};

inline std::vector<ExperimentCell> expand_cells(const AttackSweep& sweep) {
    std::vector<ExperimentCell> cells;
    switch (sweep.mode) {
        case AttackMode::None:
            cells.push_back({});
            break;
        case AttackMode::LinkFraction:
            for (double p : sweep.p) {
                ExperimentCell c;
                c.mode = sweep.mode;
                c.kind = sweep.kind;
                c.p = p;
                cells.push_back(c);
            }
            break;
        case AttackMode::EvaluatorFraction:
            for (double rho : sweep.rho) {
                if (sweep.omega.empty()) {
                    ExperimentCell c;
                    c.mode = sweep.mode;
                    c.kind = sweep.kind;
                    c.rho = rho;
                    cells.push_back(c);
                } else {
                    for (double omega : sweep.omega) {
                        ExperimentCell c;
                        c.mode = sweep.mode;
                        c.kind = sweep.kind;
                        c.rho = rho;
                        c.omega = omega;
                        cells.push_back(c);
                    }
                }
            }
            break;
    }
    return cells;
}

struct ResultRow {
    std::string method;
    double beta;
    std::string attack_kind;
    double p, rho, omega;
    std::uint64_t seed;
    double tau, auc, recall, rs;
    int L;
    int iterations;
    bool converged;
};

namespace cfgdetail {

inline std::string opt_num(double v) {
    return std::isnan(v) ? std::string() : format_double(v);
}

}  // namespace cfgdetail

inline void write_rows_csv(const std::string& path, const std::vector<ResultRow>& rows) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "method,beta,attack_kind,p,rho,omega,seed,tau,auc,recall,rs,L,iterations,converged\n";
    for (const auto& r : rows) {
        out << r.method << ',' << format_double(r.beta) << ',' << r.attack_kind << ','
            << cfgdetail::opt_num(r.p) << ',' << cfgdetail::opt_num(r.rho) << ','
            << cfgdetail::opt_num(r.omega) << ',' << r.seed << ','
            << cfgdetail::opt_num(r.tau) << ',' << cfgdetail::opt_num(r.auc) << ','
            << cfgdetail::opt_num(r.recall) << ',' << cfgdetail::opt_num(r.rs) << ','
            << r.L << ',' << r.iterations << ',' << (r.converged ? 1 : 0) << '\n';
    }
}

struct ExperimentSummary {
    std::size_t rows = 0;
    std::size_t failed_cells = 0;
    std::string per_realization_path;
    std::string aggregate_path;
    std::string errors_path;
};

namespace rundetail {

struct TaskOutput {
    std::vector<ResultRow> rows;
    std::string error;  // non-empty on failure
};

inline double mean(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / v.size();
}

inline double sample_std(const std::vector<double>& v, double m) {
    if (v.size() < 2) return 0.0;
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return std::sqrt(s / (v.size() - 1));
}

}  // namespace rundetail

// Runs the full sweep: every attack cell x realization, each method on the
// identical attacked graph, all metrics, then per-realization and aggregate
// CSVs. A failing cell is logged and skipped; the rest proceed.
inline ExperimentSummary run_experiment(const ExperimentConfig& cfg, int threads = 1) {
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);

    // Shared base graph for file data; loaded once.
    BipartiteRatingGraph base_graph;
    if (!cfg.data.synthetic) {
        if (cfg.data.format == "movielens")
            base_graph = load_movielens(cfg.data.path, cfg.data.min_degree).graph;
        else
            base_graph = load_graph_csv(cfg.data.path);
        if (cfg.data.sample_fraction < 1.0)
            base_graph =
                subsample_evaluators(base_graph, cfg.data.sample_fraction, cfg.base_seed).graph;
    }

    const auto cells = expand_cells(cfg.attack);
    const std::size_t tasks = cells.size() * cfg.realizations;
    std::vector<rundetail::TaskOutput> outputs(tasks);

    auto run_task = [&](std::size_t task) {
        const std::size_t cell_idx = task / cfg.realizations;
        const int realization = static_cast<int>(task % cfg.realizations);
        const ExperimentCell& cell = cells[cell_idx];
        auto& out = outputs[task];
        try {
            const std::uint64_t seed =
                cfg.base_seed ^ stable_hash(cell.key() + ";r=" + std::to_string(realization));

            BipartiteRatingGraph graph;
            SyntheticGroundTruth truth;
            bool have_truth = false;
            if (cfg.data.synthetic) {
                SynthConfig sc = cfg.data.synth;
                sc.seed = stable_hash("data;" + std::to_string(seed));
                auto data = generate(sc);
                graph = std::move(data.graph);
                truth = std::move(data.truth);
                have_truth = true;
            } else {
                graph = base_graph;
            }

            std::vector<int> spammer_ids;
            const std::uint64_t attack_seed = stable_hash("attack;" + std::to_string(seed));
            switch (cell.mode) {
                case AttackMode::None:
                    break;
                case AttackMode::LinkFraction: {
                    auto attacked = distort_links(graph, cell.kind, cell.p, attack_seed);
                    graph = std::move(attacked.graph);
                    break;
                }
                case AttackMode::EvaluatorFraction: {
                    AttackResult attacked =
                        std::isnan(cell.omega)
                            ? corrupt_evaluators_synthetic(graph, cell.kind, cell.rho, attack_seed)
                            : corrupt_evaluators_real(graph, cell.kind, cell.rho, cell.omega,
                                                      RatingScale{1.0, 5.0, true}, attack_seed);
                    graph = std::move(attacked.graph);
                    spammer_ids = std::move(attacked.spammer_ids);
                    break;
                }
            }

            std::optional<ClusteringProfile> profile;
            for (const auto& method : cfg.methods)
                if (method.variant != Variant::CR && !profile) profile = compute_profile(graph);

            std::vector<int> bench;
            if (have_truth) bench = benchmark_objects(truth, cfg.benchmark_fraction);

            std::vector<int> L_values = cfg.L;
            if (!spammer_ids.empty()) {
                const int d = static_cast<int>(spammer_ids.size());
                const auto& multiples =
                    (!cfg.L_over_d.empty() || !cfg.L.empty()) ? cfg.L_over_d
                                                              : std::vector<double>{2.0};
                for (double m : multiples)
                    L_values.push_back(std::min(graph.evaluator_count(),
                                                static_cast<int>(round_half_up(m * d))));
            }
            if (L_values.empty()) L_values.push_back(0);

            for (const auto& method : cfg.methods) {
                const auto state = run_engine(graph, method, cfg.engine,
                                              profile ? &*profile : nullptr);
                const auto ranked = rank_evaluators(state);

                const double nan = std::numeric_limits<double>::quiet_NaN();
                double tau = nan, auc = nan;
                if (have_truth) {
                    std::vector<double> est, intrinsic;
                    for (int a = 0; a < graph.object_count(); ++a) {
                        if (std::isnan(state.qualities[a])) continue;
                        est.push_back(state.qualities[a]);
                        intrinsic.push_back(truth.intrinsic_qualities[a]);
                    }
                    tau = kendall_tau(est, intrinsic);
                }
                if (!spammer_ids.empty())
                    auc = auc_evaluators(state.reputations, spammer_ids);
                else if (have_truth)
                    auc = auc_objects(state.qualities, bench);

                for (int L : L_values) {
                    ResultRow row;
                    row.method = variant_name(method.variant);
                    row.beta = method.beta;
                    row.attack_kind =
                        cell.mode == AttackMode::None ? "none" : spam_kind_name(cell.kind);
                    row.p = cell.p;
                    row.rho = cell.rho;
                    row.omega = cell.omega;
                    row.seed = seed;
                    row.tau = tau;
                    row.auc = auc;
                    row.recall = spammer_ids.empty() ? nan : recall_at(ranked, spammer_ids, L);
                    row.rs = spammer_ids.empty() ? nan : ranking_score(ranked, spammer_ids);
                    row.L = L;
                    row.iterations = state.iteration;
                    row.converged = state.converged;
                    out.rows.push_back(std::move(row));
                }
            }
        } catch (const std::exception& e) {
            out.rows.clear();
            out.error = cell.key() + ";r=" + std::to_string(realization) + ": " + e.what();
        }
    };

    if (threads <= 1 || tasks <= 1) {
        for (std::size_t t = 0; t < tasks; ++t) run_task(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const int n = std::min<int>(threads, static_cast<int>(tasks));
        for (int w = 0; w < n; ++w)
            pool.emplace_back([&] {
                for (std::size_t t = next.fetch_add(1); t < tasks; t = next.fetch_add(1))
                    run_task(t);
            });
        for (auto& th : pool) th.join();
    }

    ExperimentSummary summary;
    std::vector<ResultRow> rows;
    std::vector<std::string> errors;
    for (auto& out : outputs) {
        if (!out.error.empty()) errors.push_back(out.error);
        for (auto& r : out.rows) rows.push_back(std::move(r));
    }
    summary.rows = rows.size();
    summary.failed_cells = errors.size();
    summary.per_realization_path =
        (fs::path(cfg.output_dir) / "per_realization.csv").string();
    write_rows_csv(summary.per_realization_path, rows);

    // Aggregate per (method, beta, cell, L): mean and sample std per metric.
    struct Key {
        std::string method;
        double beta, p, rho, omega;
        int L;
        bool operator<(const Key& o) const {
            auto t = [](double v) { return std::isnan(v) ? -1.0 : v; };
            return std::make_tuple(method, beta, t(p), t(rho), t(omega), L) <
                   std::make_tuple(o.method, o.beta, t(o.p), t(o.rho), t(o.omega), o.L);
        }
    };
    std::map<Key, std::vector<const ResultRow*>> groups;
    for (const auto& r : rows) groups[{r.method, r.beta, r.p, r.rho, r.omega, r.L}].push_back(&r);

    summary.aggregate_path = (fs::path(cfg.output_dir) / "aggregate.csv").string();
    std::ofstream agg(summary.aggregate_path);
    agg << "method,beta,attack_kind,p,rho,omega,L,realizations,"
           "tau_mean,tau_std,auc_mean,auc_std,recall_mean,recall_std,rs_mean,rs_std,"
           "iterations_mean,converged_all\n";
    for (const auto& [key, members] : groups) {
        auto collect = [&](double ResultRow::* field) {
            std::vector<double> v;
            for (const ResultRow* r : members)
                if (!std::isnan(r->*field)) v.push_back(r->*field);
            return v;
        };
        auto emit = [&](const std::vector<double>& v) {
            if (v.empty()) {
                agg << ",,";
                return;
            }
            const double m = rundetail::mean(v);
            agg << format_double(m) << ',' << format_double(rundetail::sample_std(v, m)) << ',';
        };
        double iters = 0.0;
        bool converged_all = true;
        for (const ResultRow* r : members) {
            iters += r->iterations;
            converged_all = converged_all && r->converged;
        }
        agg << key.method << ',' << format_double(key.beta) << ',' << members.front()->attack_kind
            << ',' << cfgdetail::opt_num(key.p) << ',' << cfgdetail::opt_num(key.rho) << ','
            << cfgdetail::opt_num(key.omega) << ',' << key.L << ',' << members.size() << ',';
        emit(collect(&ResultRow::tau));
        emit(collect(&ResultRow::auc));
        emit(collect(&ResultRow::recall));
        emit(collect(&ResultRow::rs));
        agg << format_double(iters / members.size()) << ',' << (converged_all ? 1 : 0) << '\n';
    }
    agg.close();

    if (!errors.empty()) {
        summary.errors_path = (fs::path(cfg.output_dir) / "errors.txt").string();
        std::ofstream err(summary.errors_path);
        for (const auto& e : errors) err << e << '\n';
    }
    return summary;
}

}  // namespace crct
