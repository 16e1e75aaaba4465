#pragma once

#include <Eigen/Dense>

#include <complex>
#include <vector>

namespace smoco {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Centralized numeric tolerances.
struct Tol {
    static constexpr double symmetry = 1e-9;
    static constexpr double lyap_residual = 1e-8;
    static constexpr double rank = 1e-8;
    static constexpr double gain_identity = 1e-9;
    static constexpr double condition_limit = 1e12;
};

// Largest eigenvalue of (M + M^T)/2. M must be symmetric within
// Tol::symmetry * ||M||_inf.
double sym_eig_max(const Matrix& M);

// All eigenvalues of a square matrix, with multiplicity, unordered.
std::vector<std::complex<double>> eig_all(const Matrix& M);

// Solves F^T P + P F = -W for symmetric P > 0 via Kronecker vectorization.
// Requires F Hurwitz and W symmetric positive definite.
Matrix solve_lyapunov(const Matrix& F, const Matrix& W);

struct LstsqResult {
    Matrix X;
    double residual;  // Frobenius norm of A*X - B at the minimizer
    bool rank_deficient;
};

// Minimum-Frobenius-residual solution of A*X ~ B (minimum-norm when A is
// rank deficient).
LstsqResult lstsq(const Matrix& A, const Matrix& B);

// Inverse of a square matrix; throws when the condition estimate exceeds
// Tol::condition_limit.
Matrix inverse(const Matrix& M);

// Moore-Penrose pseudo-inverse via SVD.
Matrix pseudo_inverse(const Matrix& M);

// Assembles a block matrix from a rectangular grid of blocks; validates
// row/column consistency.
Matrix block_assemble(const std::vector<std::vector<Matrix>>& grid);

// Kronecker product, used by the Lyapunov solver and by discrete
// covariance utilities.
Matrix kron(const Matrix& A, const Matrix& B);

// Numerical rank with threshold Tol::rank * sigma_max.
int numerical_rank(const Matrix& M);

}  // namespace smoco
