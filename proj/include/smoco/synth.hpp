#pragma once

#include "smoco/model.hpp"

#include <complex>
#include <vector>

namespace smoco {

// Pole region D(half_angle, radius, shift): sector of half_angle about the
// negative real axis, disk of given radius about the origin, and the
// half-plane Re(s) < shift.
struct LmiRegion {
    double half_angle;  // radians, in (0, pi/2]
    double radius;      // > 0
    double shift;       // require Re(s) < shift
};

bool region_contains(const LmiRegion& region, std::complex<double> pole);

// Deterministic default: count real poles evenly spaced in
// [shift * 1.05, -0.9 * radius].
std::vector<std::complex<double>> default_region_poles(const LmiRegion& region,
                                                       int count);

struct GainSet {
    Matrix L_bar;     // (n+m) x p observer gain
    Matrix Lcal_bar;  // (n+m) x (n+m) cascade gain
    Matrix H1;        // m x p
    Matrix H2;        // p x p
    Matrix H3;        // p x (n+m)
    Matrix K;         // m x n state feedback
    Matrix K_bar;     // m x (n+m) compensation gain [K, -B_dagger*B_f]
    Matrix B_dagger;  // m x n left pseudo-inverse of B
    double mu1 = 0.0;
    double mu2 = 0.0;
    double mu3 = 0.0;
};

struct PoleReport {
    std::vector<std::complex<double>> observer_poles;
    std::vector<std::complex<double>> cascade_poles;
    std::vector<std::complex<double>> controller_poles;
    bool observer_in_region = false;
    bool cascade_in_region = false;
};

struct Certificate {
    Matrix P_bar;  // observer Lyapunov matrix
    Matrix N1;     // P_bar * E^-1 * L_bar
    Matrix N2;     // cascade-layer P * E^-1 * Lcal_bar
    Matrix Q;      // closed-loop Lyapunov matrix
    double beta = 0.0;
    double margin_theorem1 = 0.0;
    double margin_theorem3 = 0.0;
    double beta_theorem3 = 0.0;
    double margin_closed_loop = 0.0;
    PoleReport pole_report;
    bool pass = false;
};

enum class LoopMode { SMO, SMO_CO };

// Places eig(A + B*Kg) at the requested self-conjugate pole list and
// returns Kg. Sylvester-based with a deterministic seeded parameter matrix;
// Ackermann for single-input pairs.
Matrix place_pair(const Matrix& A, const Matrix& B,
                  const std::vector<std::complex<double>>& poles);

// Observer gain: eig(E^-1 (A_bar - L_bar C_bar)) = poles.
Matrix place_observer_gain(const AugmentedModel& aug,
                           const std::vector<std::complex<double>>& poles);

// Cascade gain: eig(E^-1 (A_bar - Lcal_bar)) = poles. Exact since the
// cascade output map is the identity.
Matrix place_cascade_gain(const AugmentedModel& aug,
                          const std::vector<std::complex<double>>& poles);

struct Theorem1Result {
    Matrix P_bar;
    Matrix N1;
    double margin;
};

// Lyapunov construction for the observer certificate: P_bar solves the
// Lyapunov equation of E^-1(A_bar - L_bar C_bar) against I, which makes the
// assembled inequality block equal -I (margin -1).
Theorem1Result certify_theorem1(const AugmentedModel& aug, const Matrix& L_bar);

struct SwitchGains {
    Matrix H1;
    Matrix H2;
    Matrix H3;
    double mu1;
    double mu2;
    double mu3;
    double schur_margin1;  // max eig of the Schur certificate block for H1
    double schur_margin2;
    bool c_bar_rank_deficient;
};

// Constraint-approximation solve of the switching gains against P_bar.
SwitchGains solve_switch_gains(const AugmentedModel& aug, const Matrix& C_omega,
                               const Matrix& L_bar, const Matrix& P_bar);

// State feedback: eig(A + B*K) = poles.
Matrix place_state_feedback(const PlantModel& plant,
                            const std::vector<std::complex<double>>& poles);

struct CompensatorGain {
    Matrix B_dagger;
    Matrix K_bar;
};

CompensatorGain compensator_gain(const PlantModel& plant, const Matrix& K);

// Closed-loop certificate for the chosen mode. Error-block Lyapunov
// matrices are scaled by beta, found by a doubling search from 1 until the
// assembled block matrix is negative definite or beta exceeds 1e12.
Certificate certify_closed_loop(const AugmentedModel& aug,
                                const PlantModel& plant, const GainSet& gains,
                                LoopMode mode);

// Stationary standard deviation of sel^T z for the discrete one-step map of
// zdot = F z + B_w w driven by i.i.d. per-step noise of variance
// noise_var, integrated by the classical 4th-order one-step formulas at
// step dt. Used to rank candidate observer gains under measurement noise.
double stationary_noise_std(const Matrix& F, const Matrix& B_w,
                            const Vector& sel, double dt, double noise_var);

}  // namespace smoco
