#include "heave/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "heave/error.hpp"
#include "heave/stats.hpp"

namespace heave::metrics {

double h_score(const graph::Digraph& estimated, const graph::Hierarchy& truth) {
    if (estimated.n != truth.size()) throw ValidationError("h_score: dimension mismatch");
    const graph::Hierarchy canonical = graph::canonicalize(estimated);
    const int n = estimated.n;
    if (n < 2) return 1.0;
    int agree = 0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const bool est_label = canonical.levels[i] > canonical.levels[j];
            const bool true_label = truth.levels[i] > truth.levels[j];
            if (est_label == true_label) ++agree;
        }
    }
    return static_cast<double>(agree) / (static_cast<double>(n) * (n - 1));
}

double h_score(const var::CausalNetwork& estimated, const graph::Hierarchy& truth) {
    return h_score(estimated.graph, truth);
}

double f1_score(const graph::Digraph& estimated, const graph::Digraph& truth) {
    if (estimated.n != truth.n) throw ValidationError("f1_score: dimension mismatch");
    int tp = 0, fp = 0, fn = 0;
    for (int i = 0; i < truth.n; ++i) {
        for (int j = 0; j < truth.n; ++j) {
            if (i == j) continue;  // self-links are control variables
            const bool est = estimated.edge(i, j);
            const bool tru = truth.edge(i, j);
            if (est && tru) ++tp;
            else if (est && !tru) ++fp;
            else if (!est && tru) ++fn;
        }
    }
    const double precision = tp + fp == 0 ? 0.0 : static_cast<double>(tp) / (tp + fp);
    const double recall = tp + fn == 0 ? 0.0 : static_cast<double>(tp) / (tp + fn);
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

double f_star(double f_constrained, double f_unconstrained) {
    if (!(f_unconstrained > 0.0)) {
        throw ValidationError("f_star: unconstrained fit score must be positive");
    }
    return f_constrained / f_unconstrained;
}

HierarchySummary summarize_population(const std::vector<graph::Digraph>& samples) {
    if (samples.size() < 2) throw ValidationError("summarize_population: need at least 2 samples");
    const int n = samples.front().n;
    for (const auto& g : samples) {
        if (g.n != n) throw ValidationError("summarize_population: mixed dimensions");
    }
    HierarchySummary out;
    out.mean_level.assign(static_cast<std::size_t>(n), 0.0);
    out.sd_level.assign(static_cast<std::size_t>(n), 0.0);
    out.cv.assign(static_cast<std::size_t>(n), 0.0);

    std::vector<std::vector<int>> levels;
    levels.reserve(samples.size());
    for (const auto& g : samples) {
        graph::Hierarchy h = graph::canonicalize(g);
        int height = 0;
        for (const int v : h.levels) height = std::max(height, v);
        out.sample_heights.push_back(height);
        out.height = std::max(out.height, height);
        levels.push_back(std::move(h.levels));
    }
    const double m = static_cast<double>(samples.size());
    for (int j = 0; j < n; ++j) {
        double sum = 0.0;
        for (const auto& l : levels) sum += l[static_cast<std::size_t>(j)];
        const double mean = sum / m;
        bool constant = true;
        double ss = 0.0;
        for (const auto& l : levels) {
            const double d = l[static_cast<std::size_t>(j)] - mean;
            ss += d * d;
            if (l[static_cast<std::size_t>(j)] != levels.front()[static_cast<std::size_t>(j)]) {
                constant = false;
            }
        }
        out.mean_level[static_cast<std::size_t>(j)] = mean;
        const double sd = constant ? 0.0 : std::sqrt(ss / m);
        out.sd_level[static_cast<std::size_t>(j)] = sd;
        out.cv[static_cast<std::size_t>(j)] = constant ? 0.0 : sd / mean;
    }
    return out;
}

namespace {

std::vector<std::pair<int, double>> ccdf_from_degrees(const std::vector<int>& degrees) {
    const double n = static_cast<double>(degrees.size());
    const int max_degree = degrees.empty() ? 0 : *std::max_element(degrees.begin(), degrees.end());
    std::vector<std::pair<int, double>> out;
    out.reserve(static_cast<std::size_t>(max_degree) + 1);
    for (int d = 0; d <= max_degree; ++d) {
        const auto count = std::count_if(degrees.begin(), degrees.end(),
                                         [d](int v) { return v >= d; });
        out.emplace_back(d, static_cast<double>(count) / n);
    }
    return out;
}

}  // namespace

DegreeCcdf degree_ccdf(const graph::Digraph& g) {
    const int n = g.n;
    std::vector<int> in_deg(static_cast<std::size_t>(n), 0);
    std::vector<int> out_deg(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (i != j && g.edge(i, j)) {
                ++out_deg[static_cast<std::size_t>(i)];
                ++in_deg[static_cast<std::size_t>(j)];
            }
        }
    }
    std::vector<int> total(static_cast<std::size_t>(n), 0);
    for (int i = 0; i < n; ++i) {
        total[static_cast<std::size_t>(i)] =
            in_deg[static_cast<std::size_t>(i)] + out_deg[static_cast<std::size_t>(i)];
    }
    DegreeCcdf out;
    out.in_ccdf = ccdf_from_degrees(in_deg);
    out.out_ccdf = ccdf_from_degrees(out_deg);
    out.total_ccdf = ccdf_from_degrees(total);
    return out;
}

namespace {

std::vector<double> mid_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[idx[j + 1]] == values[idx[i]]) ++j;
        const double rank = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[idx[k]] = rank;
        i = j + 1;
    }
    return ranks;
}

}  // namespace

std::pair<double, double> spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ValidationError("spearman: length mismatch");
    const std::size_t n = x.size();
    if (n < 3) throw ValidationError("spearman: need at least 3 observations");
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(x[i]) || !std::isfinite(y[i])) {
            throw ValidationError("spearman: non-finite input");
        }
    }
    const std::vector<double> rx = mid_ranks(x);
    const std::vector<double> ry = mid_ranks(y);
    const double mean = (static_cast<double>(n) + 1.0) / 2.0;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = rx[i] - mean;
        const double dy = ry[i] - mean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        throw ValidationError("spearman: zero rank variance (constant input)");
    }
    double rho = sxy / std::sqrt(sxx * syy);
    rho = std::clamp(rho, -1.0, 1.0);
    const double df = static_cast<double>(n) - 2.0;
    double p;
    if (std::fabs(rho) >= 1.0) {
        p = 0.0;
    } else {
        const double t = rho * std::sqrt(df / (1.0 - rho * rho));
        p = stats::student_t_two_sided_p(t, df);
    }
    return {rho, p};
}

std::pair<double, double> bootstrap_mean_ci(const std::vector<double>& samples, double level,
                                            int draws, Rng& rng) {
    if (samples.size() < 2) throw ValidationError("bootstrap_mean_ci: need at least 2 samples");
    if (!(level > 0.0) || !(level < 1.0)) {
        throw ValidationError("bootstrap_mean_ci: level must lie strictly in (0,1)");
    }
    if (draws < 1) throw ValidationError("bootstrap_mean_ci: need at least 1 draw");
    const int n = static_cast<int>(samples.size());
    const double sample_mean =
        std::accumulate(samples.begin(), samples.end(), 0.0) / static_cast<double>(n);
    std::vector<double> means(static_cast<std::size_t>(draws));
    for (int d = 0; d < draws; ++d) {
        double sum = 0.0;
        for (int i = 0; i < n; ++i) sum += samples[static_cast<std::size_t>(rng.uniform_int(0, n - 1))];
        means[static_cast<std::size_t>(d)] = sum / static_cast<double>(n);
    }
    std::sort(means.begin(), means.end());
    const auto quantile = [&](double q) {
        const auto pos = static_cast<std::size_t>(
            std::clamp(std::ceil(q * draws) - 1.0, 0.0, static_cast<double>(draws - 1)));
        return means[pos];
    };
    const double tail = (1.0 - level) / 2.0;
    double low = quantile(tail);
    double high = quantile(1.0 - tail);
    // The interval is for the mean; keep the point estimate inside it.
    low = std::min(low, sample_mean);
    high = std::max(high, sample_mean);
    return {low, high};
}

const char* significance_stars(double p_value) {
    if (p_value <= 0.001) return "***";
    if (p_value <= 0.01) return "**";
    if (p_value <= 0.05) return "*";
    return "";
}

}  // namespace heave::metrics
