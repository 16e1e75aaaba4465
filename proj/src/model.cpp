#include "smoco/model.hpp"

#include <Eigen/Eigenvalues>

#include <sstream>
#include <stdexcept>

namespace smoco {

DisturbanceBounds DisturbanceBounds::lumped(double switch_gain,
                                            double omega_bar) {
    DisturbanceBounds b;
    b.switch_gain = switch_gain;
    b.omega_bar = omega_bar;
    return b;
}

DisturbanceBounds DisturbanceBounds::from_parts(double d_bar, double h_bar,
                                                double eta, double omega_bar,
                                                const Matrix& Phi) {
    DisturbanceBounds b;
    b.d_bar = d_bar;
    b.h_bar = h_bar;
    b.eta = eta;
    b.omega_bar = omega_bar;
    // Scalarized lump: the matrix term enters through the infinity norm of
    // Phi^-1.
    b.switch_gain = d_bar + h_bar * inverse(Phi).cwiseAbs().rowwise().sum().maxCoeff() + eta;
    return b;
}

ValidationReport validate_plant(const PlantModel& plant) {
    ValidationReport rep;
    const int n = plant.n();
    const int m = plant.m();
    const int p = plant.p();
    if (plant.A.cols() != n || plant.B.rows() != n || plant.C.cols() != n ||
        plant.Lambda.rows() != m || plant.Lambda.cols() != m ||
        plant.C_omega.rows() != p || plant.C_omega.cols() != p) {
        rep.issues.push_back("dimension mismatch among A, B, C, Lambda, C_omega");
        return rep;
    }

    Matrix ctrb(n, n * m);
    Matrix obsv(n * p, n);
    Matrix Apow = Matrix::Identity(n, n);
    for (int k = 0; k < n; ++k) {
        ctrb.block(0, k * m, n, m) = Apow * plant.B;
        obsv.block(k * p, 0, p, n) = plant.C * Apow;
        Apow = plant.A * Apow;
    }
    rep.controllability_rank = numerical_rank(ctrb);
    rep.observability_rank = numerical_rank(obsv);
    if (rep.controllability_rank < n) {
        rep.issues.push_back("pair (A, B) is not controllable");
    }
    if (rep.observability_rank < n) {
        rep.issues.push_back("pair (A, C) is not observable");
    }

    Eigen::JacobiSVD<Matrix> svd(plant.Lambda);
    const auto& sv = svd.singularValues();
    rep.lambda_condition = sv(sv.size() - 1) > 0.0
                               ? sv(0) / sv(sv.size() - 1)
                               : std::numeric_limits<double>::infinity();
    if (!std::isfinite(rep.lambda_condition)) {
        rep.issues.push_back("Lambda is singular");
    }

    const Matrix Cw_sym = 0.5 * (plant.C_omega + plant.C_omega.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> es(Cw_sym, Eigen::EigenvaluesOnly);
    rep.c_omega_psd = es.eigenvalues().minCoeff() >= -Tol::symmetry;
    bool diag_nonneg = true;
    for (int i = 0; i < p; ++i) {
        if (plant.C_omega(i, i) < 0.0) diag_nonneg = false;
    }
    if (!rep.c_omega_psd || !diag_nonneg) {
        rep.issues.push_back("C_omega is not positive semidefinite with nonnegative diagonal");
    }

    rep.ok = rep.issues.empty();
    return rep;
}

AugmentedModel build_augmented(const PlantModel& plant, const Matrix& Phi) {
    const int n = plant.n();
    const int m = plant.m();
    if (Phi.rows() != m || Phi.cols() != m) {
        throw std::invalid_argument("build_augmented: Phi must be m x m");
    }
    if ((Phi - Phi.transpose()).cwiseAbs().maxCoeff() >
        Tol::symmetry * std::max(Phi.cwiseAbs().maxCoeff(), 1.0)) {
        throw std::invalid_argument("build_augmented: Phi must be symmetric");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(Phi, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0) {
        throw std::invalid_argument("build_augmented: Phi must be positive definite");
    }

    const Matrix Bf = plant.Bf();
    const Matrix PhiInv = inverse(Phi);

    AugmentedModel aug;
    aug.n = n;
    aug.m = m;
    aug.p = plant.p();
    aug.Phi = Phi;

    aug.E_bar = Matrix::Identity(n + m, n + m);
    aug.E_bar.block(0, n, n, m) = Bf * PhiInv;

    aug.A_bar = Matrix::Zero(n + m, n + m);
    aug.A_bar.block(0, 0, n, n) = plant.A;
    aug.A_bar.block(n, n, m, m) = -Phi;

    aug.B_bar = Matrix::Zero(n + m, m);
    aug.B_bar.block(0, 0, n, m) = plant.B;

    aug.Bf_bar = Matrix::Zero(n + m, m);
    aug.Bf_bar.block(0, 0, n, m) = Bf;
    aug.Bf_bar.block(n, 0, m, m) = Phi;

    aug.C_bar = Matrix::Zero(aug.p, n + m);
    aug.C_bar.block(0, 0, aug.p, n) = plant.C;

    // Unit block-triangular, so the explicit inverse is exact in structure.
    aug.E_inv = Matrix::Identity(n + m, n + m);
    aug.E_inv.block(0, n, n, m) = -Bf * PhiInv;

    const double id_err =
        (aug.E_bar * aug.E_inv - Matrix::Identity(n + m, n + m))
            .cwiseAbs()
            .maxCoeff();
    if (id_err > 1e-12) {
        throw std::runtime_error("build_augmented: E_bar inverse check failed");
    }
    return aug;
}

}  // namespace smoco
