// heave: fits hierarchy-constrained acyclic Granger-causal networks to
// multivariate time series with an evolutionary search over constrained
// VAR(1) models. Subcommands: simulate, fit, evaluate, analyze, benchmark.

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <sstream>

#include "heave/error.hpp"
#include "heave/kernels.hpp"
#include "heave/parallel.hpp"
#include "heave/serialize.hpp"
#include "../src/cli/commands.hpp"

namespace {

using namespace heave;

int run_app(int argc, char** argv) {
    CLI::App app{"Hierarchy-constrained acyclic VAR network fitting"};
    app.require_subcommand(1);

    // Global flags; subcommand-level options of the same name win.
    std::uint64_t global_seed = 0;
    int global_threads = 0;
    auto* global_seed_opt = app.add_option("--seed", global_seed, "RNG seed for any subcommand");
    auto* global_threads_opt =
        app.add_option("--threads", global_threads, "Worker threads for any subcommand");

    // ------------------------------------------------------------ simulate
    auto* simulate = app.add_subcommand(
        "simulate", "Generate a ground-truth DAG-VAR process and sample a panel");
    cli::SimulateArgs sim_args;
    sim_args.spec.n_nodes = 30;
    simulate->add_option("--nodes", sim_args.spec.n_nodes, "Number of series")->required();
    simulate->add_option("--edge-prob", sim_args.spec.edge_prob,
                         "Link probability before DAG enforcement (default 0.25)");
    simulate->add_option("--t-steps", sim_args.spec.t_steps,
                         "Observations (default 30 * nodes)");
    simulate->add_option("--margin", sim_args.spec.margin,
                         "Stationarity margin (default 1.05)");
    simulate->add_option("--seed", sim_args.spec.seed, "RNG seed (default 1)");
    simulate->add_option("--out", sim_args.out_dir, "Output directory")->required();

    // ----------------------------------------------------------------- fit
    auto* fit = app.add_subcommand("fit", "Evolve a constrained VAR fit for a panel CSV");
    cli::FitArgs fit_args;
    fit_args.config.threads = default_threads();
    std::string fit_variant = "floating";
    std::string fit_config_path;
    fit->add_option("--panel", fit_args.panel_path, "Panel CSV path")->required();
    fit->add_option("--out", fit_args.out_dir, "Results directory")->required();
    fit->add_option("--config", fit_config_path, "EA configuration JSON file");
    fit->add_option("--variant", fit_variant,
                    "Genotype variant: floating|bounded|canonical|ordered");
    fit->add_option("--generations", fit_args.config.generations,
                    "Generations (default 5 * nodes)");
    fit->add_option("--population", fit_args.config.population_size,
                    "Population size (default 30)");
    fit->add_option("--mutation-prob", fit_args.config.mutation_prob,
                    "Per-node mutation probability (default 0.10)");
    fit->add_option("--step-mean", fit_args.config.step_mean,
                    "Geometric mean mutation step (default nodes / 10)");
    fit->add_option("--alpha", fit_args.config.alpha,
                    "Significance level for link extraction (default 0.05)");
    fit->add_option("--seed", fit_args.config.seed, "RNG seed (default 1)");
    fit->add_option("--threads", fit_args.config.threads, "Worker threads");
    fit->add_flag("--returns-from-prices", fit_args.returns_from_prices,
                  "Treat columns as prices; fit log returns");

    // ------------------------------------------------------------ evaluate
    auto* evaluate = app.add_subcommand(
        "evaluate", "Score fit results against a simulated ground truth");
    cli::EvaluateArgs eval_args;
    evaluate->add_option("--results", eval_args.results_dir, "Fit results directory")->required();
    evaluate->add_option("--truth", eval_args.truth_dir, "Ground-truth directory")->required();
    evaluate->add_option("--report", eval_args.report_path,
                         "Report path (default <results>/report.json)");

    // ------------------------------------------------------------- analyze
    auto* analyze = app.add_subcommand(
        "analyze", "Structural analysis of fit results against the unconstrained model");
    cli::AnalyzeArgs analyze_args;
    analyze_args.threads = default_threads();
    std::string metadata_path, panel_override;
    analyze->add_option("--results", analyze_args.results_dir, "Fit results directory")
        ->required();
    analyze->add_option("--out", analyze_args.out_dir,
                        "Analysis directory (default <results>/analysis)");
    analyze->add_option("--metadata", metadata_path,
                        "Optional node metadata CSV (name column + numeric columns)");
    analyze->add_option("--panel", panel_override,
                        "Panel CSV override (skips the manifest digest check)");
    analyze->add_option("--threads", analyze_args.threads, "Worker threads");

    // ----------------------------------------------------------- benchmark
    auto* benchmark = app.add_subcommand(
        "benchmark", "Simulate datasets and compare genotype variants");
    cli::BenchmarkArgs bench_args;
    bench_args.threads = default_threads();
    std::string variants_csv = "floating,bounded,canonical,ordered";
    benchmark->add_option("--nodes", bench_args.n_nodes, "Nodes per dataset (default 30)");
    benchmark->add_option("--datasets", bench_args.n_datasets, "Dataset count (default 10)");
    benchmark->add_option("--variants", variants_csv,
                          "Comma-separated variants (default all four)");
    benchmark->add_option("--seed", bench_args.base_seed, "Base seed (default 1)");
    benchmark->add_option("--edge-prob", bench_args.edge_prob, "Link probability");
    benchmark->add_option("--t-steps", bench_args.t_steps, "Observations (default 30 * nodes)");
    benchmark->add_option("--generations", bench_args.generations,
                          "Generations (default 5 * nodes)");
    benchmark->add_option("--population", bench_args.population_size, "Population size");
    benchmark->add_option("--alpha", bench_args.alpha, "Significance level");
    benchmark->add_option("--threads", bench_args.threads, "Worker threads");
    benchmark->add_option("--out", bench_args.out_dir, "Output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage problems are validation errors
    }

    if (global_seed_opt->count() > 0) {
        if (simulate->count("--seed") == 0) sim_args.spec.seed = global_seed;
        if (fit->count("--seed") == 0) fit_args.config.seed = global_seed;
        if (benchmark->count("--seed") == 0) bench_args.base_seed = global_seed;
    }
    if (global_threads_opt->count() > 0) {
        if (fit->count("--threads") == 0) fit_args.config.threads = global_threads;
        if (analyze->count("--threads") == 0) analyze_args.threads = global_threads;
        if (benchmark->count("--threads") == 0) bench_args.threads = global_threads;
    }

    if (simulate->parsed()) {
        const cli::SimulateSummary s = cli::cmd_simulate(sim_args);
        std::printf("wrote %s: %d nodes, %d steps\n", sim_args.out_dir.c_str(), s.n_nodes,
                    s.t_steps);
        std::printf("off-diagonal links: %d (rate %.4f), spectral radius %.6f\n",
                    s.off_diagonal_links, s.effective_link_rate, s.spectral_radius);
    } else if (fit->parsed()) {
        if (!fit_config_path.empty()) {
            const auto base = serialize::ea_config_from_json(
                serialize::read_json_file(fit_config_path));
            // File supplies defaults; explicit flags win.
            cli::FitArgs merged = fit_args;
            merged.config = base;
            for (const auto* opt : fit->get_options()) {
                if (opt->count() == 0) continue;
                const std::string name = opt->get_name();
                if (name == "--variant") merged.config.variant = ea::variant_from_name(fit_variant);
                else if (name == "--generations") merged.config.generations = fit_args.config.generations;
                else if (name == "--population") merged.config.population_size = fit_args.config.population_size;
                else if (name == "--mutation-prob") merged.config.mutation_prob = fit_args.config.mutation_prob;
                else if (name == "--step-mean") merged.config.step_mean = fit_args.config.step_mean;
                else if (name == "--alpha") merged.config.alpha = fit_args.config.alpha;
                else if (name == "--seed") merged.config.seed = fit_args.config.seed;
                else if (name == "--threads") merged.config.threads = fit_args.config.threads;
            }
            fit_args = merged;
        } else {
            fit_args.config.variant = ea::variant_from_name(fit_variant);
        }
        const cli::FitSummary s = cli::cmd_fit(fit_args);
        std::printf("fit complete: %d generations, backend %s\n", s.generations,
                    kernels::backend_name());
        std::printf("f_var %.6f, best f* %.6f, links %d, height %d\n", s.f_unconstrained,
                    s.best_f_star, s.best_link_count, s.best_height);
    } else if (evaluate->parsed()) {
        const cli::EvaluateReport r = cli::cmd_evaluate(eval_args);
        std::printf("evaluated %d members over %d generations\n", r.members_evaluated,
                    r.generations_evaluated);
        std::printf("f* %.4f, best f* %.4f, H %.4f, F1 %.4f\n", r.f_star_mean,
                    r.f_star_best_mean, r.h_score_mean, r.f1_mean);
    } else if (analyze->parsed()) {
        if (!metadata_path.empty()) analyze_args.metadata_csv = metadata_path;
        if (!panel_override.empty()) analyze_args.panel_override = panel_override;
        const cli::AnalyzeReport r = cli::cmd_analyze(analyze_args);
        std::printf("VAR:      f %.4f, links %d\n", r.f_var, r.var_links);
        std::printf("Mean DAG: f %.4f (f* %.4f), links %.2f, height %.1f, CV_H %.3f\n",
                    r.f_mean_dag, r.f_star_mean_dag, r.mean_dag_links, r.mean_dag_height,
                    r.mean_cv_h);
        std::printf("Best DAG: f %.4f (f* %.4f), links %d, height %d\n", r.f_best_dag,
                    r.f_star_best_dag, r.best_dag_links, r.best_dag_height);
        std::printf("link ratio %.4f, spearman(hierarchy, out-degree) %.4f\n", r.link_ratio,
                    r.spearman_hierarchy_out_degree);
    } else if (benchmark->parsed()) {
        std::vector<ea::Variant> variants;
        std::stringstream ss(variants_csv);
        std::string token;
        while (std::getline(ss, token, ',')) {
            if (!token.empty()) variants.push_back(ea::variant_from_name(token));
        }
        bench_args.variants = variants;
        const cli::BenchmarkReport r = cli::cmd_benchmark(bench_args);
        std::printf("%-10s %8s %8s %8s %8s\n", "variant", "f*", "best f*", "H", "F1");
        for (const auto& v : r.variants) {
            std::printf("%-10s %8.4f %8.4f %8.4f %8.4f\n", ea::variant_name(v.variant),
                        v.mean.f_star, v.mean.f_star_best, v.mean.h_score, v.mean.f1);
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_app(argc, argv);
    } catch (const heave::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return e.exit_code();
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: malformed input: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
