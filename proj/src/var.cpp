#include "heave/var.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include "heave/error.hpp"
#include "heave/kernels.hpp"
#include "heave/linalg.hpp"
#include "heave/parallel.hpp"
#include "heave/stats.hpp"

namespace heave::var {

void validate_panel(const TimeSeriesPanel& panel) {
    const int t = panel.t_steps();
    const int n = panel.n_series();
    if (n < 1) throw ValidationError("panel: no series");
    if (t < n + 2) {
        throw ValidationError("panel: need at least N + 2 = " + std::to_string(n + 2) +
                              " rows to identify per-target regressions, got " +
                              std::to_string(t));
    }
    if (!panel.node_names.empty() && static_cast<int>(panel.node_names.size()) != n) {
        throw ValidationError("panel: node name count does not match series count");
    }
    for (int i = 0; i < t; ++i) {
        for (int j = 0; j < n; ++j) {
            if (!std::isfinite(panel.data(i, j))) {
                throw ValidationError("panel: non-finite value at row " + std::to_string(i) +
                                      ", column " + std::to_string(j));
            }
        }
    }
}

PanelContext make_context(const TimeSeriesPanel& panel) {
    validate_panel(panel);
    PanelContext ctx;
    ctx.n = panel.n_series();
    ctx.rows = panel.t_steps() - 1;
    ctx.names = panel.node_names;
    if (ctx.names.empty()) {
        for (int j = 0; j < ctx.n; ++j) ctx.names.push_back("y" + std::to_string(j + 1));
    }
    const auto rows = static_cast<std::size_t>(ctx.rows);
    ctx.design.resize(rows * ctx.n);
    ctx.response.resize(rows * ctx.n);
    ctx.response_mean.resize(static_cast<std::size_t>(ctx.n));
    ctx.sst.resize(static_cast<std::size_t>(ctx.n));
    for (int j = 0; j < ctx.n; ++j) {
        double* dcol = ctx.design.data() + rows * j;
        double* rcol = ctx.response.data() + rows * j;
        double sum = 0.0;
        for (int t = 0; t < ctx.rows; ++t) {
            dcol[t] = panel.data(t, j);
            rcol[t] = panel.data(t + 1, j);
            sum += rcol[t];
        }
        const double mean = sum / ctx.rows;
        ctx.response_mean[static_cast<std::size_t>(j)] = mean;
        double sst = 0.0;
        for (int t = 0; t < ctx.rows; ++t) {
            const double d = rcol[t] - mean;
            sst += d * d;
        }
        ctx.sst[static_cast<std::size_t>(j)] = sst;
        ctx.sst_total += sst;
    }
    return ctx;
}

namespace {

struct TargetResult {
    std::vector<int> covariates;  // source indices, ascending
    std::vector<double> beta;     // [intercept, covariates...]
    std::vector<double> se;       // same layout; empty in score-only mode
    double rss = 0.0;
    int k = 0;                    // total estimated parameters incl. intercept
};

// Scratch buffers reused across targets to keep the hot loop free of
// allocations.
struct Workspace {
    std::vector<double> design;
    std::vector<double> rhs;
};

std::vector<int> covariates_for_target(const graph::ConstraintMatrix* constraint, int target,
                                       int n) {
    std::vector<int> cols;
    cols.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
        // Permissible link j -> target; the mask diagonal keeps j == target.
        if (constraint == nullptr || constraint->allows(j, target)) cols.push_back(j);
    }
    return cols;
}

TargetResult solve_target(const PanelContext& ctx, int target,
                          const graph::ConstraintMatrix* constraint, bool want_se,
                          Workspace& ws) {
    const auto rows = static_cast<std::size_t>(ctx.rows);
    TargetResult out;
    out.covariates = covariates_for_target(constraint, target, ctx.n);
    const int k = static_cast<int>(out.covariates.size()) + 1;
    out.k = k;
    if (ctx.rows < k) {
        throw ValidationError("target " + ctx.names[static_cast<std::size_t>(target)] +
                              ": fewer rows than parameters");
    }

    ws.design.resize(rows * static_cast<std::size_t>(k));
    // Intercept first, then the selected lagged series.
    std::fill(ws.design.begin(), ws.design.begin() + static_cast<std::ptrdiff_t>(rows), 1.0);
    for (int c = 0; c < k - 1; ++c) {
        const int src = out.covariates[static_cast<std::size_t>(c)];
        std::memcpy(ws.design.data() + rows * static_cast<std::size_t>(c + 1),
                    ctx.design.data() + rows * static_cast<std::size_t>(src),
                    rows * sizeof(double));
    }
    ws.rhs.assign(ctx.response.data() + rows * static_cast<std::size_t>(target),
                  ctx.response.data() + rows * static_cast<std::size_t>(target + 1));

    linalg::RankDeficiency deficiency{-1};
    auto ls = linalg::solve_least_squares(ws.design, ctx.rows, k, ws.rhs, want_se, &deficiency);
    if (!ls) {
        std::string column = deficiency.column == 0
                                 ? "intercept"
                                 : ctx.names[static_cast<std::size_t>(
                                       out.covariates[static_cast<std::size_t>(deficiency.column - 1)])];
        throw NumericalError("singular design for target " +
                             ctx.names[static_cast<std::size_t>(target)] +
                             ": column '" + column + "' is collinear with preceding columns");
    }
    out.beta = std::move(ls->beta);
    out.rss = ls->rss;
    if (want_se) {
        const int dof = ctx.rows - k;
        if (dof < 1) {
            throw ValidationError("target " + ctx.names[static_cast<std::size_t>(target)] +
                                  ": no residual degrees of freedom");
        }
        const double s2 = out.rss / dof;
        out.se.resize(static_cast<std::size_t>(k));
        for (int c = 0; c < k; ++c) {
            out.se[static_cast<std::size_t>(c)] =
                std::sqrt(s2 * ls->xtx_inv_diag[static_cast<std::size_t>(c)]);
        }
    }
    return out;
}

RecurrenceEstimate assemble(const PanelContext& ctx, const std::vector<TargetResult>& fits) {
    const int n = ctx.n;
    const auto rows = static_cast<std::size_t>(ctx.rows);
    RecurrenceEstimate est;
    est.coefficients = Matrix(n, n);
    est.std_errors = Matrix(n, n);
    est.intercept.assign(static_cast<std::size_t>(n), 0.0);

    double rss_total = 0.0;
    for (int i = 0; i < n; ++i) {
        const TargetResult& fit = fits[static_cast<std::size_t>(i)];
        est.intercept[static_cast<std::size_t>(i)] = fit.beta[0];
        for (std::size_t c = 0; c < fit.covariates.size(); ++c) {
            const int src = fit.covariates[c];
            est.coefficients(i, src) = fit.beta[c + 1];
            est.std_errors(i, src) = fit.se[c + 1];
        }
        rss_total += fit.rss;
    }
    est.fit_score = 1.0 - rss_total / ctx.sst_total;

    // Residuals per target, then the cross-product matrix normalized by
    // sqrt(dof_i * dof_j) so the diagonal matches the per-target unbiased
    // variance and the matrix stays PSD under unequal masking.
    std::vector<double> residuals(rows * static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const TargetResult& fit = fits[static_cast<std::size_t>(i)];
        double* res = residuals.data() + rows * static_cast<std::size_t>(i);
        const double* resp = ctx.response.data() + rows * static_cast<std::size_t>(i);
        for (std::size_t t = 0; t < rows; ++t) res[t] = resp[t] - fit.beta[0];
        for (std::size_t c = 0; c < fit.covariates.size(); ++c) {
            kernels::axpy(-fit.beta[c + 1],
                          ctx.design.data() + rows * static_cast<std::size_t>(fit.covariates[c]),
                          res, rows);
        }
    }
    est.residual_cov = Matrix(n, n);
    for (int i = 0; i < n; ++i) {
        const double dof_i = ctx.rows - fits[static_cast<std::size_t>(i)].k;
        for (int j = i; j < n; ++j) {
            const double dof_j = ctx.rows - fits[static_cast<std::size_t>(j)].k;
            const double cross =
                kernels::dot(residuals.data() + rows * static_cast<std::size_t>(i),
                             residuals.data() + rows * static_cast<std::size_t>(j), rows);
            const double value = cross / std::sqrt(dof_i * dof_j);
            est.residual_cov(i, j) = value;
            est.residual_cov(j, i) = value;
        }
    }
    return est;
}

}  // namespace

RecurrenceEstimate fit_masked(const PanelContext& ctx,
                              const graph::ConstraintMatrix* constraint, int threads) {
    if (constraint != nullptr && constraint->n != ctx.n) {
        throw ValidationError("fit: constraint dimension does not match panel");
    }
    std::vector<TargetResult> fits(static_cast<std::size_t>(ctx.n));
    parallel_for(ctx.n, threads, [&](int i) {
        thread_local Workspace ws;
        fits[static_cast<std::size_t>(i)] = solve_target(ctx, i, constraint, true, ws);
    });
    return assemble(ctx, fits);
}

double masked_fit_score(const PanelContext& ctx, const graph::ConstraintMatrix& constraint) {
    if (constraint.n != ctx.n) throw ValidationError("fit: constraint dimension does not match panel");
    thread_local Workspace ws;
    double rss_total = 0.0;
    for (int i = 0; i < ctx.n; ++i) {
        rss_total += solve_target(ctx, i, &constraint, false, ws).rss;
    }
    return 1.0 - rss_total / ctx.sst_total;
}

RecurrenceEstimate fit_var(const TimeSeriesPanel& panel, int threads) {
    const PanelContext ctx = make_context(panel);
    return fit_masked(ctx, nullptr, threads);
}

RecurrenceEstimate fit_constrained_var(const TimeSeriesPanel& panel,
                                       const graph::ConstraintMatrix& constraint,
                                       int threads) {
    const PanelContext ctx = make_context(panel);
    return fit_masked(ctx, &constraint, threads);
}

CausalNetwork extract_network(const RecurrenceEstimate& est, double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) {
        throw ValidationError("extract_network: alpha must lie strictly in (0,1)");
    }
    const int n = est.coefficients.rows();
    const double threshold = stats::normal_quantile(1.0 - alpha / 2.0);
    CausalNetwork net;
    net.alpha = alpha;
    net.graph = graph::Digraph(n);
    net.t_values = Matrix(n, n);
    for (int target = 0; target < n; ++target) {
        for (int src = 0; src < n; ++src) {
            const double se = est.std_errors(target, src);
            if (se <= 0.0) continue;  // masked out or degenerate: never a link
            const double t = est.coefficients(target, src) / se;
            net.t_values(src, target) = t;
            if (std::fabs(t) > threshold) net.graph.set_edge(src, target);
        }
    }
    return net;
}

double normal_quantile(double q) { return stats::normal_quantile(q); }

}  // namespace heave::var
