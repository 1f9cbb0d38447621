// Command-line front end: synthetic data generation, spam injection,
// reputation ranking, metric evaluation, and full experiment sweeps.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "crct/attack.hpp"
#include "crct/clustering.hpp"
#include "crct/experiment.hpp"
#include "crct/graph.hpp"
#include "crct/io.hpp"
#include "crct/metrics.hpp"
#include "crct/reputation.hpp"
#include "crct/synthgen.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitPartial = 3;

int default_threads() {
    if (const char* env = std::getenv("CRCT_THREADS")) {
        const int n = std::atoi(env);
        if (n >= 1) return n;
    }
    return 1;
}

crct::BipartiteRatingGraph load_input_graph(const std::string& path, const std::string& format,
                                            int min_degree) {
    if (format == "movielens") return crct::load_movielens(path, min_degree).graph;
    return crct::load_graph_csv(path);
}

int cmd_generate(const crct::SynthConfig& config, const std::string& out_dir) {
    fs::create_directories(out_dir);
    const auto data = crct::generate(config);
    crct::export_graph(data.graph, (fs::path(out_dir) / "ratings.csv").string());
    crct::write_id_value_csv((fs::path(out_dir) / "intrinsic_quality.csv").string(), "object_id",
                             "intrinsic_quality", data.truth.intrinsic_qualities);
    crct::write_id_value_csv((fs::path(out_dir) / "sigma.csv").string(), "evaluator_id", "sigma",
                             data.truth.evaluator_sigmas);
    const auto stats = crct::degree_stats(data.graph);
    std::cout << "edges: " << data.graph.edge_count() << "\n"
              << "mean evaluator degree: " << stats.mean_evaluator_degree << "\n"
              << "mean object degree: " << stats.mean_object_degree << "\n"
              << "sparsity: " << stats.sparsity << "\n";
    return kExitOk;
}

int cmd_rank(const std::string& graph_path, const std::string& format, int min_degree,
             const std::string& method_name, double beta, const crct::EngineParams& params,
             const std::string& out_dir) {
    const auto graph = load_input_graph(graph_path, format, min_degree);
    crct::Method method{crct::parse_variant(method_name), beta};
    const auto state = crct::run_engine(graph, method, params);
    fs::create_directories(out_dir);
    crct::write_id_value_csv((fs::path(out_dir) / "reputation.csv").string(), "evaluator_id",
                             "reputation", state.reputations);
    crct::write_id_value_csv((fs::path(out_dir) / "quality.csv").string(), "object_id", "quality",
                             state.qualities);
    nlohmann::json summary;
    summary["method"] = method_name;
    summary["beta"] = beta;
    summary["iterations"] = state.iteration;
    summary["converged"] = state.converged;
    summary["final_quality_change"] = state.final_change;
    std::ofstream(fs::path(out_dir) / "run_summary.json") << summary.dump(2) << '\n';
    if (!state.converged)
        std::cerr << "warning: engine did not converge within " << state.iteration
                  << " iterations\n";
    std::cout << "iterations: " << state.iteration << " converged: " << state.converged << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CR/CRC/CRCT reputation ranking for bipartite rating networks"};
    app.require_subcommand(1);

    // generate
    auto* gen = app.add_subcommand("generate", "Generate a synthetic rating network");
    crct::SynthConfig synth;
    std::string gen_out = "out";
    gen->add_option("--evaluators", synth.evaluator_count, "Number of evaluators");
    gen->add_option("--objects", synth.object_count, "Number of objects");
    gen->add_option("--sparsity", synth.sparsity, "Edge density");
    gen->add_option("--delta-min", synth.delta_min, "Minimum rating-noise sigma");
    gen->add_option("--delta-max", synth.delta_max, "Maximum rating-noise sigma");
    gen->add_option("--seed", synth.seed, "RNG seed");
    gen->add_option("--out", gen_out, "Output directory");

    // attack
    auto* atk = app.add_subcommand("attack", "Inject spam into a rating graph");
    std::string atk_graph, atk_format = "csv", atk_kind = "random", atk_out = "out";
    int atk_min_degree = 20;
    std::uint64_t atk_seed = 0;
    std::optional<double> atk_p, atk_rho, atk_omega;
    double scale_min = 1.0, scale_max = 5.0;
    atk->add_option("--graph", atk_graph, "Input rating file")->required();
    atk->add_option("--format", atk_format, "Input format: csv or movielens");
    atk->add_option("--min-degree", atk_min_degree, "Evaluator degree filter (movielens)");
    atk->add_option("--kind", atk_kind, "Spam kind: random, malicious_push, malicious_mixed");
    atk->add_option("--p", atk_p, "Fraction of links to distort");
    atk->add_option("--rho", atk_rho, "Fraction of evaluators to corrupt");
    atk->add_option("--omega", atk_omega, "Spammer activity (fraction of objects rated)");
    atk->add_option("--scale-min", scale_min, "Native scale minimum (with --omega)");
    atk->add_option("--scale-max", scale_max, "Native scale maximum (with --omega)");
    atk->add_option("--seed", atk_seed, "RNG seed");
    atk->add_option("--out", atk_out, "Output directory");

    // rank
    auto* rnk = app.add_subcommand("rank", "Run the reputation engine");
    std::string rnk_graph, rnk_format = "csv", rnk_method = "CRCT", rnk_out = "out";
    int rnk_min_degree = 20;
    double rnk_beta = 2.0;
    crct::EngineParams engine_params;
    rnk->add_option("--graph", rnk_graph, "Input rating file")->required();
    rnk->add_option("--format", rnk_format, "Input format: csv or movielens");
    rnk->add_option("--min-degree", rnk_min_degree, "Evaluator degree filter (movielens)");
    rnk->add_option("--method", rnk_method, "CR, CRC or CRCT");
    rnk->add_option("--beta", rnk_beta, "Penalty-reward exponent (CRCT)");
    rnk->add_option("--threshold", engine_params.convergence_threshold, "Convergence threshold");
    rnk->add_option("--max-iterations", engine_params.max_iterations, "Iteration cap");
    rnk->add_option("--out", rnk_out, "Output directory");

    // evaluate
    auto* ev = app.add_subcommand("evaluate", "Compute metrics from engine output");
    std::string ev_reputation, ev_quality, ev_spammers, ev_intrinsic, ev_out;
    std::vector<int> ev_L;
    double ev_bench = 0.05;
    ev->add_option("--reputation", ev_reputation, "reputation.csv from rank")->required();
    ev->add_option("--quality", ev_quality, "quality.csv from rank");
    ev->add_option("--spammers", ev_spammers, "Ground-truth spammer id CSV");
    ev->add_option("--intrinsic", ev_intrinsic, "Intrinsic quality CSV");
    ev->add_option("--benchmark-fraction", ev_bench, "Top-quality fraction for object AUC");
    ev->add_option("--L", ev_L, "Detection list lengths (default 2d)");
    ev->add_option("--out", ev_out, "Output CSV (default stdout)");

    // experiment
    auto* exp = app.add_subcommand("experiment", "Run a configured sweep");
    std::string exp_config, exp_out_override;
    int threads = default_threads();
    exp->add_option("--config", exp_config, "Experiment config JSON")->required();
    exp->add_option("--out", exp_out_override, "Override output directory");
    exp->add_option("--threads", threads, "Worker threads");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        // app.exit prints the message / help text; fold CLI11's assorted
        // parse-error codes into the single usage exit code.
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (gen->parsed()) return cmd_generate(synth, gen_out);

        if (atk->parsed()) {
            const auto graph = load_input_graph(atk_graph, atk_format, atk_min_degree);
            const auto kind = crct::parse_spam_kind(atk_kind);
            crct::AttackResult result;
            if (atk_p) {
                result = crct::distort_links(graph, kind, *atk_p, atk_seed);
            } else if (atk_rho && atk_omega) {
                result = crct::corrupt_evaluators_real(graph, kind, *atk_rho, *atk_omega,
                                                       crct::RatingScale{scale_min, scale_max, true},
                                                       atk_seed);
            } else if (atk_rho) {
                result = crct::corrupt_evaluators_synthetic(graph, kind, *atk_rho, atk_seed);
            } else {
                std::cerr << "attack: need --p, or --rho (optionally with --omega)\n";
                return kExitUsage;
            }
            fs::create_directories(atk_out);
            crct::export_graph(result.graph, (fs::path(atk_out) / "ratings.csv").string());
            crct::write_id_csv((fs::path(atk_out) / "spammers.csv").string(), "evaluator_id",
                               result.spammer_ids);
            std::cout << "spammers: " << result.spammer_ids.size()
                      << " distorted edges: " << result.distorted_edges << "\n";
            return kExitOk;
        }

        if (rnk->parsed())
            return cmd_rank(rnk_graph, rnk_format, rnk_min_degree, rnk_method, rnk_beta,
                            engine_params, rnk_out);

        if (ev->parsed()) {
            const auto reputations = crct::read_id_value_csv(ev_reputation);
            crct::ReputationState state;
            state.reputations = reputations;
            const auto ranked = crct::rank_evaluators(state);

            const double nan = std::numeric_limits<double>::quiet_NaN();
            double tau = nan, auc = nan;
            std::vector<int> spammers;
            if (!ev_spammers.empty()) {
                spammers = crct::read_id_csv(ev_spammers);
                if (spammers.empty()) {
                    std::cerr << "evaluate: spammer file is empty\n";
                    return kExitData;
                }
                auc = crct::auc_evaluators(reputations, spammers);
            }
            std::vector<double> qualities, intrinsic;
            if (!ev_quality.empty()) qualities = crct::read_id_value_csv(ev_quality);
            if (!ev_intrinsic.empty()) {
                if (ev_quality.empty()) {
                    std::cerr << "evaluate: --intrinsic requires --quality\n";
                    return kExitUsage;
                }
                intrinsic = crct::read_id_value_csv(ev_intrinsic);
                if (qualities.size() != intrinsic.size()) {
                    std::cerr << "evaluate: quality and intrinsic files disagree on size\n";
                    return kExitData;
                }
                // Unrated objects have no quality estimate; drop them from tau.
                std::vector<double> est, truth;
                for (std::size_t a = 0; a < qualities.size(); ++a) {
                    if (std::isnan(qualities[a])) continue;
                    est.push_back(qualities[a]);
                    truth.push_back(intrinsic[a]);
                }
                tau = crct::kendall_tau(est, truth);
                if (ev_spammers.empty()) {
                    crct::SyntheticGroundTruth truth;
                    truth.intrinsic_qualities = intrinsic;
                    auc = crct::auc_objects(qualities, crct::benchmark_objects(truth, ev_bench));
                }
            }
            std::vector<int> L_values = ev_L;
            if (L_values.empty() && !spammers.empty())
                L_values.push_back(static_cast<int>(2 * spammers.size()));
            if (L_values.empty()) L_values.push_back(0);

            std::ostringstream rows;
            rows << "tau,auc,recall,rs,L\n";
            for (int L : L_values) {
                auto opt = [&](double v) { return std::isnan(v) ? "" : crct::format_double(v); };
                const double recall =
                    spammers.empty() ? nan : crct::recall_at(ranked, spammers, L);
                const double rs = spammers.empty() ? nan : crct::ranking_score(ranked, spammers);
                rows << opt(tau) << ',' << opt(auc) << ',' << opt(recall) << ',' << opt(rs) << ','
                     << L << '\n';
            }
            if (ev_out.empty()) {
                std::cout << rows.str();
            } else {
                std::ofstream out(ev_out);
                out << rows.str();
            }
            return kExitOk;
        }

        if (exp->parsed()) {
            auto cfg = crct::load_experiment_config(exp_config);
            if (!exp_out_override.empty()) cfg.output_dir = exp_out_override;
            const auto summary = crct::run_experiment(cfg, threads);
            std::cout << "rows: " << summary.rows << "\n"
                      << "per-realization: " << summary.per_realization_path << "\n"
                      << "aggregate: " << summary.aggregate_path << "\n";
            if (summary.failed_cells > 0) {
                std::cerr << summary.failed_cells << " cell(s) failed; see "
                          << summary.errors_path << "\n";
                return kExitPartial;
            }
            return kExitOk;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitData;
    }
    return kExitUsage;
}
