#include "heave/linalg.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

#include "heave/error.hpp"
#include "heave/kernels.hpp"

namespace heave::linalg {

namespace {

Eigen::MatrixXd to_eigen(const Matrix& a) {
    Eigen::MatrixXd m(a.rows(), a.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j) m(i, j) = a(i, j);
    return m;
}

}  // namespace

std::optional<LeastSquares> solve_least_squares(std::vector<double>& design,
                                                int rows, int cols,
                                                std::vector<double>& rhs,
                                                bool want_xtx_inv_diag,
                                                RankDeficiency* deficiency,
                                                double rank_tol) {
    if (rows < cols || cols < 1) throw ValidationError("least squares: need rows >= cols >= 1");
    const auto n = static_cast<std::size_t>(rows);

    double max_col_norm = 0.0;
    for (int j = 0; j < cols; ++j) {
        max_col_norm = std::max(max_col_norm,
                                std::sqrt(kernels::sumsq(design.data() + n * j, n)));
    }
    const double tol = std::max(rank_tol * max_col_norm, 1e-300);

    // Householder QR, reflectors stored below the diagonal of each column.
    std::vector<double> tau(static_cast<std::size_t>(cols));
    for (int j = 0; j < cols; ++j) {
        double* col = design.data() + n * j + j;
        const std::size_t len = n - static_cast<std::size_t>(j);
        const double sigma = kernels::sumsq(col, len);
        const double norm = std::sqrt(sigma);
        if (norm <= tol) {
            if (deficiency != nullptr) deficiency->column = j;
            return std::nullopt;
        }
        const double alpha = col[0] >= 0.0 ? -norm : norm;
        const double v0 = col[0] - alpha;
        // v = x - alpha*e1; H = I - 2 vv'/(v'v); v'v = sigma - x0^2 + v0^2
        const double vtv = sigma - col[0] * col[0] + v0 * v0;
        col[0] = v0;
        tau[static_cast<std::size_t>(j)] = vtv > 0.0 ? 2.0 / vtv : 0.0;
        for (int c = j + 1; c < cols; ++c) {
            double* target = design.data() + n * c + j;
            const double w = kernels::dot(col, target, len) * tau[static_cast<std::size_t>(j)];
            kernels::axpy(-w, col, target, len);
        }
        {
            double* target = rhs.data() + j;
            const double w = kernels::dot(col, target, len) * tau[static_cast<std::size_t>(j)];
            kernels::axpy(-w, col, target, len);
        }
        // R(j,j) replaces the reflector head once updates are done.
        col[0] = alpha;
    }

    LeastSquares out;
    out.rss = kernels::sumsq(rhs.data() + cols, n - static_cast<std::size_t>(cols));

    // Back substitution: R beta = (Q'y)[0..cols)
    out.beta.assign(static_cast<std::size_t>(cols), 0.0);
    for (int i = cols - 1; i >= 0; --i) {
        double s = rhs[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < cols; ++j) {
            s -= design[n * static_cast<std::size_t>(j) + static_cast<std::size_t>(i)] *
                 out.beta[static_cast<std::size_t>(j)];
        }
        out.beta[static_cast<std::size_t>(i)] =
            s / design[n * static_cast<std::size_t>(i) + static_cast<std::size_t>(i)];
    }

    if (want_xtx_inv_diag) {
        // (X'X)^-1 = R^-1 R^-T; diagonal entries are squared row norms of R^-1.
        const int k = cols;
        std::vector<double> rinv(static_cast<std::size_t>(k) * k, 0.0);
        for (int j = k - 1; j >= 0; --j) {
            const double rjj = design[n * static_cast<std::size_t>(j) + static_cast<std::size_t>(j)];
            rinv[static_cast<std::size_t>(j) * k + j] = 1.0 / rjj;
            for (int i = j - 1; i >= 0; --i) {
                double s = 0.0;
                for (int m = i + 1; m <= j; ++m) {
                    s += design[n * static_cast<std::size_t>(m) + static_cast<std::size_t>(i)] *
                         rinv[static_cast<std::size_t>(m) * k + j];
                }
                rinv[static_cast<std::size_t>(i) * k + j] =
                    -s / design[n * static_cast<std::size_t>(i) + static_cast<std::size_t>(i)];
            }
        }
        out.xtx_inv_diag.assign(static_cast<std::size_t>(k), 0.0);
        for (int i = 0; i < k; ++i) {
            out.xtx_inv_diag[static_cast<std::size_t>(i)] =
                kernels::sumsq(rinv.data() + static_cast<std::size_t>(i) * k + i,
                               static_cast<std::size_t>(k - i));
        }
    }
    return out;
}

std::vector<std::pair<double, double>> eigenvalues(const Matrix& a) {
    if (a.rows() != a.cols()) throw ValidationError("eigenvalues: matrix not square");
    Eigen::EigenSolver<Eigen::MatrixXd> solver(to_eigen(a), /*computeEigenvectors=*/false);
    if (solver.info() != Eigen::Success) throw NumericalError("eigenvalue iteration failed");
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(a.rows()));
    for (int i = 0; i < a.rows(); ++i) {
        out.emplace_back(solver.eigenvalues()[i].real(), solver.eigenvalues()[i].imag());
    }
    return out;
}

double spectral_radius(const Matrix& a) {
    double rho = 0.0;
    for (const auto& [re, im] : eigenvalues(a)) rho = std::max(rho, std::hypot(re, im));
    return rho;
}

SymmetricEigen symmetric_eigen(const Matrix& a) {
    if (a.rows() != a.cols()) throw ValidationError("symmetric_eigen: matrix not square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(a));
    if (solver.info() != Eigen::Success) throw NumericalError("symmetric eigendecomposition failed");
    SymmetricEigen out;
    out.values.assign(solver.eigenvalues().data(),
                      solver.eigenvalues().data() + a.rows());
    out.vectors = Matrix(a.rows(), a.rows());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.rows(); ++j) out.vectors(i, j) = solver.eigenvectors()(i, j);
    return out;
}

Matrix random_rotation(int n, Rng& rng) {
    Eigen::MatrixXd g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = rng.normal();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
    Eigen::MatrixXd q = qr.householderQ();
    const Eigen::MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int j = 0; j < n; ++j) {
        if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    }
    Matrix out(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) out(i, j) = q(i, j);
    return out;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) throw ValidationError("matmul: dimension mismatch");
    Matrix c(a.rows(), b.cols());
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            kernels::axpy(aik, b.row(k), c.row(i), static_cast<std::size_t>(b.cols()));
        }
    }
    return c;
}

}  // namespace heave::linalg
