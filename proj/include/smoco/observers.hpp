#pragma once

#include "smoco/model.hpp"
#include "smoco/synth.hpp"

namespace smoco {

struct ObserverState {
    Vector xhat_bar;   // (n+m)
    Vector xtilde_bar; // (n+m)
    Vector d_filt;     // m
};

struct SwitchConfig {
    double varsigma = 0.01;
    double switch_gain = 0.0;
    double omega_bar = 1.0;
};

// s / (||s||_inf + varsigma); output infinity norm strictly below 1.
Vector smoothed_sign(const Vector& s, double varsigma);

Vector u_s1(const Vector& s1, const SwitchConfig& cfg);
Vector u_s2(const Vector& s2, const SwitchConfig& cfg);
Vector u_s3(const Vector& s3, const SwitchConfig& cfg);

// First-layer switch terms computed from the output innovation
// ey = y - C_bar * xhat_bar; shared with the cascade layer.
struct SwitchTerms {
    Vector us1;  // m
    Vector us2;  // p
};

SwitchTerms switch_terms(const GainSet& gains, const Vector& ey,
                         const SwitchConfig& cfg);

// First-layer observer derivative:
// E^-1 (A_bar xhat + B_bar u + L_bar ey + Bf_bar us1 - L_bar C_omega us2).
Vector smo_rhs(const AugmentedModel& aug, const GainSet& gains,
               const Matrix& C_omega, const Vector& xhat_bar, const Vector& y,
               const Vector& u, const SwitchConfig& cfg);

// Cascade-layer derivative; reuses the first layer's switch terms and adds
// L_bar C_omega us3 driven by eps = xhat - xtilde:
// E^-1 (A_bar xtilde + B_bar u + Lcal (xhat - xtilde)
//       + Bf_bar us1 - L_bar C_omega us2 + L_bar C_omega us3).
Vector cascade_rhs(const AugmentedModel& aug, const GainSet& gains,
                   const Matrix& C_omega, const Vector& xtilde_bar,
                   const Vector& xhat_bar, const Vector& u,
                   const SwitchTerms& shared, const SwitchConfig& cfg);

// First-order low-pass comparator state: ddot_f = (dhat - d_filt) / tau.
Vector lowpass_rhs(const Vector& d_filt, const Vector& dhat, double tau);

}  // namespace smoco
