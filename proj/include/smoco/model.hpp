#pragma once

#include "smoco/linalg.hpp"

#include <string>
#include <vector>

namespace smoco {

// Linear plant  xdot = A x + B u + B_f d,  y = C x + C_omega * omega,
// with B_f = B * Lambda.
struct PlantModel {
    Matrix A;        // n x n
    Matrix B;        // n x m
    Matrix C;        // p x n
    Matrix Lambda;   // m x m, nonsingular
    Matrix C_omega;  // p x p, PSD

    int n() const { return static_cast<int>(A.rows()); }
    int m() const { return static_cast<int>(B.cols()); }
    int p() const { return static_cast<int>(C.rows()); }
    Matrix Bf() const { return B * Lambda; }
};

// Bounds on the lumped disturbance and noise. switch_gain is the lumped
// magnitude d_bar + h_bar*||Phi^-1||_inf + eta unless set directly.
struct DisturbanceBounds {
    double d_bar = 0.0;
    double h_bar = 0.0;
    double eta = 1.0;
    double omega_bar = 1.0;
    double switch_gain = 0.0;

    static DisturbanceBounds lumped(double switch_gain, double omega_bar);
    static DisturbanceBounds from_parts(double d_bar, double h_bar, double eta,
                                        double omega_bar, const Matrix& Phi);
};

// Descriptor form  E_bar xbardot = A_bar xbar + B_bar u + Bf_bar dbar + ...,
// xbar = [x; d], dbar = d + Phi^-1 * ddot.
struct AugmentedModel {
    Matrix E_bar;   // (n+m) x (n+m), unit upper block triangular
    Matrix A_bar;   // (n+m) x (n+m), blockdiag(A, -Phi)
    Matrix B_bar;   // (n+m) x m
    Matrix Bf_bar;  // (n+m) x m
    Matrix C_bar;   // p x (n+m)
    Matrix Phi;     // m x m, PD
    Matrix E_inv;   // cached inverse of E_bar
    int n = 0;
    int m = 0;
    int p = 0;

    // Drift of the premultiplied descriptor system, E_bar^-1 * A_bar.
    Matrix F() const { return E_inv * A_bar; }
};

struct ValidationReport {
    int controllability_rank = 0;
    int observability_rank = 0;
    double lambda_condition = 0.0;
    bool c_omega_psd = false;
    bool ok = false;
    std::vector<std::string> issues;
};

ValidationReport validate_plant(const PlantModel& plant);

// Builds the augmented descriptor model for a symmetric PD Phi.
AugmentedModel build_augmented(const PlantModel& plant, const Matrix& Phi);

}  // namespace smoco
