#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "heave/graph.hpp"
#include "heave/matrix.hpp"
#include "heave/rng.hpp"
#include "heave/var.hpp"

// Ground-truth generators for the simulation benchmarks: random SPD
// innovation covariances, sparse stationary recurrence matrices, DAG
// enforcement through a random hierarchy, and panel sampling.

namespace heave::sim {

struct ProcessSpec {
    int n_nodes = 0;
    double edge_prob = 0.25;
    int t_steps = 0;       // 0 means 30 * n_nodes
    double margin = 1.05;  // stationarity margin; spectral radius becomes 1/margin
    std::uint64_t seed = 1;

    int resolved_t_steps() const { return t_steps > 0 ? t_steps : 30 * n_nodes; }
};

void validate_spec(const ProcessSpec& spec);

struct GroundTruth {
    Matrix recurrence;          // DAG-consistent A (diagonal kept)
    Matrix covariance;          // innovation covariance
    graph::Hierarchy hierarchy; // generating levels X
    graph::Digraph network;     // causal-orientation support of recurrence
    var::TimeSeriesPanel panel;
};

// Eigenvalue/rotation factors of a generated covariance, reusable as the
// noise factorization when sampling.
struct CovFactors {
    Matrix rotation;                 // orthogonal Q
    std::vector<double> eigenvalues; // sampled |N(0,1)| spectrum
};

// Sigma = Q diag(lambda) Q' with lambda_i ~ |N(0,1)| (zero draws are
// resampled) and Q a random rotation.
Matrix gen_covariance(int n, Rng& rng, CovFactors* factors = nullptr);

// Construction helper shared with tests: Q diag(eigs) Q'.
Matrix covariance_from_spectrum(const Matrix& rotation, const std::vector<double>& eigenvalues);

// Erdos-Renyi support with standard normal weights, scaled so the
// spectral radius equals 1/margin. Returns the matrix and its support as
// a causal-orientation digraph (edge source -> target iff the target's
// coefficient on the source is nonzero).
std::pair<Matrix, graph::Digraph> gen_recurrence(int n, double p_edge, double margin, Rng& rng);

// Draws X ~ U{1..N}^N and keeps only hierarchy-consistent coefficients
// (the diagonal always survives). Returns the masked matrix and X.
std::pair<Matrix, graph::Hierarchy> enforce_dag(const Matrix& a, Rng& rng);

// Iterates y_t = A y_{t-1} + eps_t from zero, drops a burn-in prefix,
// returns t_steps rows. Noise is factorized through the symmetric
// eigendecomposition of cov (or reuses the provided factors).
var::TimeSeriesPanel simulate_panel(const Matrix& a, const Matrix& cov, int t_steps, Rng& rng);
var::TimeSeriesPanel simulate_panel(const Matrix& a, const CovFactors& factors, int t_steps,
                                    Rng& rng);

// gen_covariance -> gen_recurrence -> enforce_dag -> simulate_panel,
// driven by a single seeded stream; bit-exact given (spec, seed).
GroundTruth make_ground_truth(const ProcessSpec& spec);

// Causal-orientation support of a recurrence matrix: edge s -> t iff
// a(t, s) != 0 (diagonal kept as self-loops).
graph::Digraph support_network(const Matrix& a);

int burn_in_steps();

}  // namespace heave::sim
