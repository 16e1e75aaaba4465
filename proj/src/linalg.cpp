#include "smoco/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>

#include <sstream>
#include <stdexcept>

namespace smoco {

namespace {

void require_square(const Matrix& M, const char* op) {
    if (M.rows() != M.cols()) {
        std::ostringstream os;
        os << op << ": matrix must be square, got " << M.rows() << "x"
           << M.cols();
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

double sym_eig_max(const Matrix& M) {
    require_square(M, "sym_eig_max");
    const double scale = M.cwiseAbs().maxCoeff();
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > Tol::symmetry * std::max(scale, 1.0)) {
        throw std::invalid_argument("sym_eig_max: matrix is not symmetric within tolerance");
    }
    const Matrix S = 0.5 * (M + M.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(S, Eigen::EigenvaluesOnly);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("sym_eig_max: eigenvalue iteration failed");
    }
    return es.eigenvalues().maxCoeff();
}

std::vector<std::complex<double>> eig_all(const Matrix& M) {
    require_square(M, "eig_all");
    if (!M.allFinite()) {
        throw std::invalid_argument("eig_all: non-finite entries");
    }
    Eigen::EigenSolver<Matrix> es(M, false);
    if (es.info() != Eigen::Success) {
        throw std::runtime_error("eig_all: eigenvalue iteration failed");
    }
    std::vector<std::complex<double>> out(M.rows());
    for (int i = 0; i < M.rows(); ++i) out[i] = es.eigenvalues()(i);
    return out;
}

Matrix kron(const Matrix& A, const Matrix& B) {
    Matrix out(A.rows() * B.rows(), A.cols() * B.cols());
    for (int i = 0; i < A.rows(); ++i) {
        for (int j = 0; j < A.cols(); ++j) {
            out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) =
                A(i, j) * B;
        }
    }
    return out;
}

Matrix solve_lyapunov(const Matrix& F, const Matrix& W) {
    require_square(F, "solve_lyapunov");
    require_square(W, "solve_lyapunov");
    const int n = static_cast<int>(F.rows());
    if (W.rows() != n) {
        throw std::invalid_argument("solve_lyapunov: dimension mismatch");
    }
    for (const auto& ev : eig_all(F)) {
        if (ev.real() >= 0.0) {
            std::ostringstream os;
            os << "solve_lyapunov: F is not Hurwitz, eigenvalue " << ev.real()
               << (ev.imag() >= 0 ? "+" : "") << ev.imag() << "i";
            throw std::invalid_argument(os.str());
        }
    }
    // vec(F^T P + P F) = (I (x) F^T + F^T (x) I) vec(P) = -vec(W)
    const Matrix I = Matrix::Identity(n, n);
    const Matrix sys = kron(I, F.transpose()) + kron(F.transpose(), I);
    Eigen::VectorXd rhs(n * n);
    for (int j = 0; j < n; ++j) rhs.segment(j * n, n) = -W.col(j);
    Eigen::PartialPivLU<Matrix> lu(sys);
    const Eigen::VectorXd pv = lu.solve(rhs);
    Matrix P(n, n);
    for (int j = 0; j < n; ++j) P.col(j) = pv.segment(j * n, n);
    P = 0.5 * (P + P.transpose());
    const double res = (F.transpose() * P + P * F + W).cwiseAbs().maxCoeff();
    if (res > Tol::lyap_residual * std::max(W.cwiseAbs().maxCoeff(), 1.0)) {
        throw std::runtime_error("solve_lyapunov: residual exceeds tolerance");
    }
    return P;
}

LstsqResult lstsq(const Matrix& A, const Matrix& B) {
    if (A.rows() != B.rows()) {
        throw std::invalid_argument("lstsq: row dimension mismatch");
    }
    Eigen::CompleteOrthogonalDecomposition<Matrix> cod(A);
    LstsqResult out;
    out.X = cod.solve(B);
    out.residual = (A * out.X - B).norm();
    out.rank_deficient = cod.rank() < A.cols();
    return out;
}

Matrix inverse(const Matrix& M) {
    require_square(M, "inverse");
    Eigen::JacobiSVD<Matrix> svd(M);
    const auto& sv = svd.singularValues();
    const double cond =
        sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : std::numeric_limits<double>::infinity();
    if (!(cond < Tol::condition_limit)) {
        std::ostringstream os;
        os << "inverse: matrix is singular or ill-conditioned (cond estimate "
           << cond << ")";
        throw std::invalid_argument(os.str());
    }
    return M.inverse();
}

Matrix pseudo_inverse(const Matrix& M) {
    Eigen::JacobiSVD<Matrix> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const auto& sv = svd.singularValues();
    const double cutoff = Tol::rank * std::max(M.rows(), M.cols()) *
                          (sv.size() > 0 ? sv(0) : 0.0);
    Eigen::VectorXd inv_sv(sv.size());
    for (int i = 0; i < sv.size(); ++i) {
        inv_sv(i) = sv(i) > cutoff ? 1.0 / sv(i) : 0.0;
    }
    return svd.matrixV() * inv_sv.asDiagonal() * svd.matrixU().transpose();
}

Matrix block_assemble(const std::vector<std::vector<Matrix>>& grid) {
    if (grid.empty() || grid.front().empty()) {
        throw std::invalid_argument("block_assemble: empty grid");
    }
    const std::size_t ncols = grid.front().size();
    std::vector<Eigen::Index> row_heights(grid.size());
    std::vector<Eigen::Index> col_widths(ncols);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i].size() != ncols) {
            throw std::invalid_argument("block_assemble: ragged grid");
        }
        row_heights[i] = grid[i][0].rows();
        for (std::size_t j = 0; j < ncols; ++j) {
            if (grid[i][j].rows() != row_heights[i]) {
                throw std::invalid_argument("block_assemble: inconsistent block row heights");
            }
            if (i == 0) col_widths[j] = grid[0][j].cols();
            if (grid[i][j].cols() != col_widths[j]) {
                throw std::invalid_argument("block_assemble: inconsistent block column widths");
            }
        }
    }
    Eigen::Index rows = 0, cols = 0;
    for (auto h : row_heights) rows += h;
    for (auto w : col_widths) cols += w;
    Matrix out(rows, cols);
    Eigen::Index r0 = 0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        Eigen::Index c0 = 0;
        for (std::size_t j = 0; j < ncols; ++j) {
            out.block(r0, c0, row_heights[i], col_widths[j]) = grid[i][j];
            c0 += col_widths[j];
        }
        r0 += row_heights[i];
    }
    return out;
}

int numerical_rank(const Matrix& M) {
    Eigen::JacobiSVD<Matrix> svd(M);
    const auto& sv = svd.singularValues();
    if (sv.size() == 0) return 0;
    const double cutoff = Tol::rank * sv(0);
    int rank = 0;
    for (int i = 0; i < sv.size(); ++i) {
        if (sv(i) > cutoff) ++rank;
    }
    return rank;
}

}  // namespace smoco
