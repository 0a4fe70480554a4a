#include "heave/simulate.hpp"

#include <cmath>
#include <string>

#include "heave/error.hpp"
#include "heave/kernels.hpp"
#include "heave/linalg.hpp"

namespace heave::sim {

namespace {
constexpr int kBurnIn = 200;
}

int burn_in_steps() { return kBurnIn; }

void validate_spec(const ProcessSpec& spec) {
    if (spec.n_nodes < 2) throw ValidationError("process spec: need at least 2 nodes");
    if (!(spec.edge_prob > 0.0) || spec.edge_prob > 1.0) {
        throw ValidationError("process spec: edge probability must lie in (0,1]");
    }
    if (!(spec.margin > 1.0)) throw ValidationError("process spec: margin must exceed 1");
    if (spec.resolved_t_steps() < spec.n_nodes + 2) {
        throw ValidationError("process spec: too few observations for the node count");
    }
}

Matrix covariance_from_spectrum(const Matrix& rotation, const std::vector<double>& eigenvalues) {
    const int n = rotation.rows();
    Matrix scaled(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            scaled(i, j) = rotation(i, j) * eigenvalues[static_cast<std::size_t>(j)];
        }
    }
    Matrix cov(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double v = kernels::dot(scaled.row(i), rotation.row(j), static_cast<std::size_t>(n));
            cov(i, j) = v;
            cov(j, i) = v;
        }
    }
    return cov;
}

Matrix gen_covariance(int n, Rng& rng, CovFactors* factors) {
    if (n < 1) throw ValidationError("gen_covariance: need n >= 1");
    std::vector<double> eigenvalues(static_cast<std::size_t>(n));
    for (auto& lambda : eigenvalues) {
        do {
            lambda = std::fabs(rng.normal());
        } while (lambda == 0.0);
    }
    const Matrix q = linalg::random_rotation(n, rng);
    Matrix cov = covariance_from_spectrum(q, eigenvalues);
    if (factors != nullptr) {
        factors->rotation = q;
        factors->eigenvalues = std::move(eigenvalues);
    }
    return cov;
}

graph::Digraph support_network(const Matrix& a) {
    const int n = a.rows();
    graph::Digraph g(n);
    for (int target = 0; target < n; ++target) {
        for (int src = 0; src < n; ++src) {
            if (a(target, src) != 0.0) g.set_edge(src, target);
        }
    }
    return g;
}

std::pair<Matrix, graph::Digraph> gen_recurrence(int n, double p_edge, double margin, Rng& rng) {
    if (n < 2) throw ValidationError("gen_recurrence: need n >= 2");
    if (!(p_edge > 0.0) || p_edge > 1.0) {
        throw ValidationError("gen_recurrence: edge probability must lie in (0,1]");
    }
    if (!(margin > 1.0)) throw ValidationError("gen_recurrence: margin must exceed 1");
    for (;;) {
        Matrix a(n, n);
        int edges = 0;
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (rng.bernoulli(p_edge)) {
                    a(i, j) = rng.normal();
                    if (a(i, j) != 0.0) ++edges;
                }
            }
        }
        if (edges == 0) continue;  // empty draw: resample
        const double rho = linalg::spectral_radius(a);
        if (rho <= 1e-12) continue;  // nilpotent draw: rescaling cannot work
        const double scale = 1.0 / (rho * margin);
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) a(i, j) *= scale;
        }
        return {a, support_network(a)};
    }
}

std::pair<Matrix, graph::Hierarchy> enforce_dag(const Matrix& a, Rng& rng) {
    if (a.rows() != a.cols()) throw ValidationError("enforce_dag: matrix not square");
    const int n = a.rows();
    std::vector<int> levels(static_cast<std::size_t>(n));
    for (auto& level : levels) level = rng.uniform_int(1, n);
    graph::Hierarchy h(levels);
    const graph::ConstraintMatrix mask = graph::constraint_from_hierarchy(h);
    Matrix masked(n, n);
    for (int target = 0; target < n; ++target) {
        for (int src = 0; src < n; ++src) {
            // Coefficient (target, src) encodes the causal edge src -> target.
            if (mask.allows(src, target)) masked(target, src) = a(target, src);
        }
    }
    return {masked, h};
}

namespace {

var::TimeSeriesPanel simulate_impl(const Matrix& a, const Matrix& rotation,
                                   const std::vector<double>& eigenvalues, int t_steps,
                                   Rng& rng) {
    const int n = a.rows();
    if (t_steps < 1) throw ValidationError("simulate_panel: need t_steps >= 1");
    const double rho = linalg::spectral_radius(a);
    if (rho >= 1.0) {
        throw ValidationError("simulate_panel: non-stationary recurrence (spectral radius " +
                              std::to_string(rho) + ")");
    }
    std::vector<double> noise_scale(eigenvalues.size());
    for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
        if (eigenvalues[i] < 0.0) {
            throw ValidationError("simulate_panel: covariance not positive semi-definite");
        }
        noise_scale[i] = std::sqrt(eigenvalues[i]);
    }

    var::TimeSeriesPanel panel;
    panel.data = Matrix(t_steps, n);
    for (int j = 0; j < n; ++j) panel.node_names.push_back("y" + std::to_string(j + 1));

    std::vector<double> state(static_cast<std::size_t>(n), 0.0);
    std::vector<double> next(static_cast<std::size_t>(n), 0.0);
    std::vector<double> z(static_cast<std::size_t>(n), 0.0);
    for (int t = 0; t < kBurnIn + t_steps; ++t) {
        for (int i = 0; i < n; ++i) {
            z[static_cast<std::size_t>(i)] = rng.normal() * noise_scale[static_cast<std::size_t>(i)];
        }
        for (int i = 0; i < n; ++i) {
            next[static_cast<std::size_t>(i)] =
                kernels::dot(a.row(i), state.data(), static_cast<std::size_t>(n)) +
                kernels::dot(rotation.row(i), z.data(), static_cast<std::size_t>(n));
        }
        std::swap(state, next);
        if (t >= kBurnIn) {
            double* row = panel.data.row(t - kBurnIn);
            for (int i = 0; i < n; ++i) row[i] = state[static_cast<std::size_t>(i)];
        }
    }
    return panel;
}

}  // namespace

var::TimeSeriesPanel simulate_panel(const Matrix& a, const Matrix& cov, int t_steps, Rng& rng) {
    if (cov.rows() != a.rows() || cov.cols() != a.rows()) {
        throw ValidationError("simulate_panel: covariance dimension mismatch");
    }
    const linalg::SymmetricEigen eig = linalg::symmetric_eigen(cov);
    std::vector<double> eigenvalues = eig.values;
    for (auto& v : eigenvalues) {
        if (v < 0.0 && v > -1e-12) v = 0.0;  // clip tiny negative round-off
    }
    return simulate_impl(a, eig.vectors, eigenvalues, t_steps, rng);
}

var::TimeSeriesPanel simulate_panel(const Matrix& a, const CovFactors& factors, int t_steps,
                                    Rng& rng) {
    return simulate_impl(a, factors.rotation, factors.eigenvalues, t_steps, rng);
}

GroundTruth make_ground_truth(const ProcessSpec& spec) {
    validate_spec(spec);
    Rng rng(spec.seed);
    GroundTruth truth;
    CovFactors factors;
    truth.covariance = gen_covariance(spec.n_nodes, rng, &factors);
    // Masking can raise the spectral radius above the normalized value
    // (the masked radius is the largest |diagonal| entry, which the full
    // matrix's radius does not bound), so redraw until the DAG process is
    // itself inside the stationarity margin. At N >= 30 retries are rare.
    for (;;) {
        auto [a_full, support_full] = gen_recurrence(spec.n_nodes, spec.edge_prob, spec.margin, rng);
        auto [a_masked, hierarchy] = enforce_dag(a_full, rng);
        if (linalg::spectral_radius(a_masked) > 1.0 / spec.margin + 1e-9) continue;
        truth.recurrence = std::move(a_masked);
        truth.hierarchy = std::move(hierarchy);
        break;
    }
    truth.network = support_network(truth.recurrence);
    truth.panel = simulate_panel(truth.recurrence, factors, spec.resolved_t_steps(), rng);
    return truth;
}

}  // namespace heave::sim
