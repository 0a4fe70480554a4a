#pragma once

#include <string>
#include <vector>

#include "heave/graph.hpp"
#include "heave/matrix.hpp"

// Order-1 vector autoregression estimation, optionally masked by a
// constraint matrix, and extraction of the significance-thresholded
// causal network.
//
// Orientation conventions (used consistently across the project):
//  - coefficients(i, j) is the effect of series j at t-1 on series i at
//    t, i.e. row = target, column = source.
//  - A constraint mask is in graph orientation: mask(i, j) permits the
//    causal edge i -> j. Target i may therefore regress on exactly the
//    covariates {j : mask(j, i) = 1}; the diagonal keeps every target's
//    own lag available.
//  - The causal network is the transpose pattern of the significant
//    coefficients: edge j -> i iff coefficients(i, j) is significant.
//    t_values are stored in network orientation to match.

namespace heave::var {

struct TimeSeriesPanel {
    Matrix data;  // rows are time steps, columns are series
    std::vector<std::string> node_names;

    int t_steps() const { return data.rows(); }
    int n_series() const { return data.cols(); }
};

// Throws ValidationError unless T >= N + 2, all entries finite, names
// consistent.
void validate_panel(const TimeSeriesPanel& panel);

struct RecurrenceEstimate {
    Matrix coefficients;          // N x N, masked-out entries exactly zero
    std::vector<double> intercept;
    Matrix std_errors;            // N x N, zero where masked out
    Matrix residual_cov;          // symmetric PSD
    double fit_score = 0.0;       // pooled in-sample R^2, in (-inf, 1]
};

struct CausalNetwork {
    graph::Digraph graph;  // edge i -> j iff coefficient (j, i) significant
    double alpha = 0.0;
    Matrix t_values;       // network orientation; zero where masked out
};

// Reusable regression context for one panel: lagged design and response
// columns stored contiguously, plus per-target total sums of squares.
// The evolutionary loop fits thousands of masks against one panel, so
// this is built once and shared (immutable after construction).
struct PanelContext {
    int n = 0;
    int rows = 0;                       // T - 1 regression rows
    std::vector<double> design;         // column-major rows x n, lagged values
    std::vector<double> response;       // column-major rows x n
    std::vector<double> response_mean;  // per target
    std::vector<double> sst;            // per target, mean-adjusted
    double sst_total = 0.0;
    std::vector<std::string> names;
};

PanelContext make_context(const TimeSeriesPanel& panel);

// Unconstrained per-target OLS with intercept.
RecurrenceEstimate fit_var(const TimeSeriesPanel& panel, int threads = 1);

// Constraint-masked per-target OLS; excluded coefficients and standard
// errors are exactly zero.
RecurrenceEstimate fit_constrained_var(const TimeSeriesPanel& panel,
                                       const graph::ConstraintMatrix& constraint,
                                       int threads = 1);

// Context-level variants used by the evolutionary loop.
RecurrenceEstimate fit_masked(const PanelContext& ctx,
                              const graph::ConstraintMatrix* constraint,
                              int threads = 1);

// Pooled fit score only (skips standard errors and the residual
// covariance). Same regressions, same score as fit_masked.
double masked_fit_score(const PanelContext& ctx, const graph::ConstraintMatrix& constraint);

// Network per Phi(1 - alpha/2) thresholding of |coef|/se. Entries with
// zero standard error are never links.
CausalNetwork extract_network(const RecurrenceEstimate& est, double alpha);

// Standard normal quantile (re-exported from stats for the module surface).
double normal_quantile(double q);

}  // namespace heave::var
