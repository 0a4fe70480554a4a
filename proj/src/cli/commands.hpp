#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "heave/evolution.hpp"
#include "heave/metrics.hpp"
#include "heave/simulate.hpp"

// Command implementations behind the CLI binary. Each command is a pure
// function of its arguments plus the referenced files; data artifacts are
// byte-identical across reruns with the same inputs and seed. manifest.json
// additionally carries a wall-clock timestamp for provenance and is the
// only non-reproducible output.

namespace heave::cli {

inline constexpr const char* kToolName = "heave";
inline constexpr const char* kToolVersion = "0.1.0";

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    sim::ProcessSpec spec;
    std::filesystem::path out_dir;
};

struct SimulateSummary {
    int n_nodes = 0;
    int t_steps = 0;
    int off_diagonal_links = 0;
    double effective_link_rate = 0.0;  // off-diagonal links / N(N-1)
    double spectral_radius = 0.0;      // of the DAG-consistent recurrence
};

// Writes panel.csv, truth.json, spec.json.
SimulateSummary cmd_simulate(const SimulateArgs& args);

// -------------------------------------------------------------------- fit

struct FitArgs {
    std::filesystem::path panel_path;
    std::filesystem::path out_dir;
    ea::EAConfig config;
    bool returns_from_prices = false;
};

struct FitSummary {
    double f_unconstrained = 0.0;
    double best_f_star = 0.0;
    int best_link_count = 0;
    int best_height = 0;
    int generations = 0;
};

// Writes trace.csv, best_network.json, best_hierarchy.json,
// terminal_population.json, manifest.json.
FitSummary cmd_fit(const FitArgs& args);

// --------------------------------------------------------------- evaluate

struct EvaluateArgs {
    std::filesystem::path results_dir;
    std::filesystem::path truth_dir;
    std::filesystem::path report_path;  // empty: results_dir / report.json
};

struct EvaluateReport {
    double f_star_mean = 0.0;       // population mean over the terminal window
    double f_star_best_mean = 0.0;  // per-generation best, averaged
    double h_score_mean = 0.0;
    double f1_mean = 0.0;
    int generations_evaluated = 0;
    int members_evaluated = 0;
    metrics::ScoreReport best_member;  // highest-scoring terminal member
};

EvaluateReport cmd_evaluate(const EvaluateArgs& args);

// ---------------------------------------------------------------- analyze

struct AnalyzeArgs {
    std::filesystem::path results_dir;
    std::filesystem::path out_dir;  // empty: results_dir / "analysis"
    std::optional<std::filesystem::path> metadata_csv;
    std::optional<std::filesystem::path> panel_override;
    int threads = 1;
};

struct AnalyzeReport {
    double f_var = 0.0;
    int var_links = 0;
    double f_mean_dag = 0.0;
    double f_star_mean_dag = 0.0;
    double mean_dag_links = 0.0;
    double mean_dag_height = 0.0;
    double mean_cv_h = 0.0;
    double f_best_dag = 0.0;
    double f_star_best_dag = 0.0;
    int best_dag_links = 0;
    int best_dag_height = 0;
    double link_ratio = 0.0;  // mean DAG links / VAR links
    double spearman_hierarchy_out_degree = 0.0;
    std::optional<double> spearman_ratio_metadata;
};

// Writes summary.json, ccdf_var.csv, ccdf_samples.csv, spearman.csv,
// degree_ratio.csv.
AnalyzeReport cmd_analyze(const AnalyzeArgs& args);

// -------------------------------------------------------------- benchmark

struct BenchmarkArgs {
    int n_nodes = 30;
    int n_datasets = 10;
    std::vector<ea::Variant> variants;
    std::uint64_t base_seed = 1;
    double edge_prob = 0.25;
    int t_steps = 0;      // 0: 30 * n
    int generations = 0;  // 0: 5 * n
    int population_size = 30;
    double mutation_prob = 0.10;
    double step_mean = 0.0;  // 0: n / 10
    double alpha = 0.05;
    int threads = 1;
    std::filesystem::path out_dir;  // empty: no files, in-memory only
};

struct RunScores {
    double f_star = 0.0;       // final-5 population mean
    double f_star_best = 0.0;  // final-5 mean of per-generation best
    double h_score = 0.0;      // final-5 mean (simulation truth attached)
    double f1 = 0.0;
};

struct VariantBenchmark {
    ea::Variant variant;
    std::vector<RunScores> per_dataset;
    RunScores mean;  // across datasets
    // Per-generation across-dataset means with bootstrap CIs, for plotting.
    std::vector<ea::GenerationTrace> mean_trace;
    std::vector<std::pair<double, double>> fstar_ci;
    std::vector<std::pair<double, double>> hscore_ci;
    std::vector<std::pair<double, double>> f1_ci;
};

struct BenchmarkReport {
    std::vector<VariantBenchmark> variants;
};

// Simulates n_datasets ground truths (seed base_seed + d) and runs every
// variant on each with the paired EA seed. Used by `heave benchmark` and
// by the acceptance suite.
BenchmarkReport cmd_benchmark(const BenchmarkArgs& args);

// ------------------------------------------------------------------ utils

// Metadata CSV: header row, first column node name, remaining columns
// numeric attributes. Returns column name -> (node name -> value).
std::map<std::string, std::map<std::string, double>> read_metadata_csv(
    const std::filesystem::path& path);

std::string iso8601_utc_now();

}  // namespace heave::cli
