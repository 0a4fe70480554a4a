#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "heave/graph.hpp"
#include "heave/rng.hpp"
#include "heave/var.hpp"

namespace heave::metrics {

struct ScoreReport {
    double f_raw = 0.0;
    double f_star = 0.0;
    std::optional<double> h_score;
    std::optional<double> f1;
    double link_count = 0.0;
    double mean_degree = 0.0;
};

// Terminal-sample statistics of canonical node levels.
struct HierarchySummary {
    std::vector<double> mean_level;
    std::vector<double> sd_level;  // population convention (1/n)
    std::vector<double> cv;        // sd / mean, exactly 0 for constant nodes
    int height = 0;                // max canonical level over all samples
    std::vector<int> sample_heights;
};

// Agreement of permissible-link labels between the estimate's canonical
// hierarchy and the ground-truth hierarchy, over all N(N-1) ordered
// off-diagonal pairs.
double h_score(const graph::Digraph& estimated, const graph::Hierarchy& truth);
double h_score(const var::CausalNetwork& estimated, const graph::Hierarchy& truth);

// Link classification F1 over off-diagonal entries; zero denominators
// yield 0.
double f1_score(const graph::Digraph& estimated, const graph::Digraph& truth);

// f_constrained / f_unconstrained; the unconstrained fit is the in-sample
// upper bound used for standardization.
double f_star(double f_constrained, double f_unconstrained);

HierarchySummary summarize_population(const std::vector<graph::Digraph>& samples);

struct DegreeCcdf {
    // (degree, fraction of nodes with degree >= that value); starts at
    // (0, 1.0), weakly decreasing.
    std::vector<std::pair<int, double>> in_ccdf;
    std::vector<std::pair<int, double>> out_ccdf;
    std::vector<std::pair<int, double>> total_ccdf;
};

DegreeCcdf degree_ccdf(const graph::Digraph& g);

// Spearman rank correlation with mid-ranks for ties; two-sided p-value
// from the t approximation with n-2 degrees of freedom.
std::pair<double, double> spearman(const std::vector<double>& x, const std::vector<double>& y);

// Percentile bootstrap confidence interval for the mean.
std::pair<double, double> bootstrap_mean_ci(const std::vector<double>& samples, double level,
                                            int draws, Rng& rng);

// Significance stars per the 0.05 / 0.01 / 0.001 thresholds.
const char* significance_stars(double p_value);

}  // namespace heave::metrics
