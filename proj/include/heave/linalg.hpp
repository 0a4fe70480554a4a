#pragma once

#include <optional>
#include <vector>

#include "heave/matrix.hpp"
#include "heave/rng.hpp"

namespace heave::linalg {

// Least-squares solution of min ||X b - y|| via Householder QR.
//
// `design` holds X column-major (lda = rows) and is overwritten with the
// factorization. `rhs` (length rows) is overwritten as well. On rank
// deficiency the index of the first dependent column is reported instead
// of a solution.
struct LeastSquares {
    std::vector<double> beta;            // length cols
    double rss = 0.0;                    // ||X b - y||^2, from the Q'y tail
    std::vector<double> xtx_inv_diag;    // diag of (X'X)^-1; filled on request
};

struct RankDeficiency {
    int column;
};

// Returns the fit, or the offending column when the design is numerically
// rank deficient (subcolumn norm below rank_tol * largest column norm).
std::optional<LeastSquares> solve_least_squares(std::vector<double>& design,
                                                int rows, int cols,
                                                std::vector<double>& rhs,
                                                bool want_xtx_inv_diag,
                                                RankDeficiency* deficiency,
                                                double rank_tol = 1e-10);

// Eigenvalues of a general square real matrix as (re, im) pairs.
std::vector<std::pair<double, double>> eigenvalues(const Matrix& a);

// max_i |lambda_i|
double spectral_radius(const Matrix& a);

// Symmetric eigendecomposition a = V diag(w) V'. `a` must be symmetric.
struct SymmetricEigen {
    std::vector<double> values;  // ascending
    Matrix vectors;              // columns are eigenvectors
};
SymmetricEigen symmetric_eigen(const Matrix& a);

// Haar-ish random rotation: Q factor of a standard normal matrix with the
// sign convention diag(R) > 0.
Matrix random_rotation(int n, Rng& rng);

// c = a * b
Matrix matmul(const Matrix& a, const Matrix& b);

}  // namespace heave::linalg
