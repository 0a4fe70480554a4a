#pragma once

// Test-only reference implementation of the constraint-masked VAR(1)
// regression: per-target normal equations assembled from scratch and
// solved by Gauss-Jordan elimination with full inverse, standard errors
// from the inverse diagonal, pooled R^2 across targets. Shares no code
// with the Householder path in src/; used as the independent oracle.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "heave/graph.hpp"
#include "heave/matrix.hpp"
#include "heave/var.hpp"

namespace heave::testing {

struct OracleFit {
    Matrix coefficients;
    std::vector<double> intercept;
    Matrix std_errors;
    double fit_score = 0.0;
};

inline std::vector<std::vector<double>> invert_spd(std::vector<std::vector<double>> a) {
    const std::size_t k = a.size();
    std::vector<std::vector<double>> inv(k, std::vector<double>(k, 0.0));
    for (std::size_t i = 0; i < k; ++i) inv[i][i] = 1.0;
    for (std::size_t p = 0; p < k; ++p) {
        std::size_t pivot = p;
        for (std::size_t r = p + 1; r < k; ++r) {
            if (std::fabs(a[r][p]) > std::fabs(a[pivot][p])) pivot = r;
        }
        std::swap(a[p], a[pivot]);
        std::swap(inv[p], inv[pivot]);
        const double d = a[p][p];
        if (d == 0.0) throw std::runtime_error("oracle: singular normal equations");
        for (std::size_t c = 0; c < k; ++c) {
            a[p][c] /= d;
            inv[p][c] /= d;
        }
        for (std::size_t r = 0; r < k; ++r) {
            if (r == p) continue;
            const double f = a[r][p];
            if (f == 0.0) continue;
            for (std::size_t c = 0; c < k; ++c) {
                a[r][c] -= f * a[p][c];
                inv[r][c] -= f * inv[p][c];
            }
        }
    }
    return inv;
}

inline OracleFit oracle_constrained_fit(const var::TimeSeriesPanel& panel,
                                        const graph::ConstraintMatrix& mask) {
    const int n = panel.n_series();
    const int rows = panel.t_steps() - 1;
    OracleFit fit;
    fit.coefficients = Matrix(n, n);
    fit.std_errors = Matrix(n, n);
    fit.intercept.assign(static_cast<std::size_t>(n), 0.0);

    double sse_total = 0.0;
    double sst_total = 0.0;
    for (int target = 0; target < n; ++target) {
        std::vector<int> sources;
        for (int j = 0; j < n; ++j) {
            if (mask.allows(j, target)) sources.push_back(j);
        }
        const std::size_t k = sources.size() + 1;

        // Normal equations X'X b = X'y with the intercept first.
        std::vector<std::vector<double>> xtx(k, std::vector<double>(k, 0.0));
        std::vector<double> xty(k, 0.0);
        for (int t = 0; t < rows; ++t) {
            std::vector<double> x(k, 1.0);
            for (std::size_t c = 0; c < sources.size(); ++c) {
                x[c + 1] = panel.data(t, sources[c]);
            }
            const double y = panel.data(t + 1, target);
            for (std::size_t i = 0; i < k; ++i) {
                for (std::size_t j = 0; j < k; ++j) xtx[i][j] += x[i] * x[j];
                xty[i] += x[i] * y;
            }
        }
        const auto inv = invert_spd(xtx);
        std::vector<double> beta(k, 0.0);
        for (std::size_t i = 0; i < k; ++i) {
            for (std::size_t j = 0; j < k; ++j) beta[i] += inv[i][j] * xty[j];
        }

        double sse = 0.0, mean = 0.0;
        for (int t = 0; t < rows; ++t) mean += panel.data(t + 1, target);
        mean /= rows;
        double sst = 0.0;
        for (int t = 0; t < rows; ++t) {
            double fitted = beta[0];
            for (std::size_t c = 0; c < sources.size(); ++c) {
                fitted += beta[c + 1] * panel.data(t, sources[c]);
            }
            const double y = panel.data(t + 1, target);
            sse += (y - fitted) * (y - fitted);
            sst += (y - mean) * (y - mean);
        }
        sse_total += sse;
        sst_total += sst;

        const double sigma2 = sse / (rows - static_cast<int>(k));
        fit.intercept[static_cast<std::size_t>(target)] = beta[0];
        for (std::size_t c = 0; c < sources.size(); ++c) {
            fit.coefficients(target, sources[c]) = beta[c + 1];
            fit.std_errors(target, sources[c]) = std::sqrt(sigma2 * inv[c + 1][c + 1]);
        }
    }
    fit.fit_score = 1.0 - sse_total / sst_total;
    return fit;
}

}  // namespace heave::testing
