#include "smoco/observers.hpp"

#include <stdexcept>

namespace smoco {

Vector smoothed_sign(const Vector& s, double varsigma) {
    if (varsigma <= 0.0) {
        throw std::invalid_argument("smoothed_sign: varsigma must be positive");
    }
    const double denom = s.size() > 0 ? s.cwiseAbs().maxCoeff() + varsigma : varsigma;
    return s / denom;
}

Vector u_s1(const Vector& s1, const SwitchConfig& cfg) {
    return cfg.switch_gain * smoothed_sign(s1, cfg.varsigma);
}

Vector u_s2(const Vector& s2, const SwitchConfig& cfg) {
    return -cfg.omega_bar * smoothed_sign(s2, cfg.varsigma);
}

Vector u_s3(const Vector& s3, const SwitchConfig& cfg) {
    return cfg.omega_bar * smoothed_sign(s3, cfg.varsigma);
}

SwitchTerms switch_terms(const GainSet& gains, const Vector& ey,
                         const SwitchConfig& cfg) {
    SwitchTerms out;
    out.us1 = u_s1(gains.H1 * ey, cfg);
    out.us2 = u_s2(gains.H2 * ey, cfg);
    return out;
}

Vector smo_rhs(const AugmentedModel& aug, const GainSet& gains,
               const Matrix& C_omega, const Vector& xhat_bar, const Vector& y,
               const Vector& u, const SwitchConfig& cfg) {
    const Vector ey = y - aug.C_bar * xhat_bar;
    const SwitchTerms sw = switch_terms(gains, ey, cfg);
    return aug.E_inv * (aug.A_bar * xhat_bar + aug.B_bar * u +
                        gains.L_bar * ey + aug.Bf_bar * sw.us1 -
                        gains.L_bar * (C_omega * sw.us2));
}

Vector cascade_rhs(const AugmentedModel& aug, const GainSet& gains,
                   const Matrix& C_omega, const Vector& xtilde_bar,
                   const Vector& xhat_bar, const Vector& u,
                   const SwitchTerms& shared, const SwitchConfig& cfg) {
    const Vector eps = xhat_bar - xtilde_bar;
    const Vector us3 = u_s3(gains.H3 * eps, cfg);
    return aug.E_inv * (aug.A_bar * xtilde_bar + aug.B_bar * u +
                        gains.Lcal_bar * eps + aug.Bf_bar * shared.us1 -
                        gains.L_bar * (C_omega * shared.us2) +
                        gains.L_bar * (C_omega * us3));
}

Vector lowpass_rhs(const Vector& d_filt, const Vector& dhat, double tau) {
    if (tau <= 0.0) {
        throw std::invalid_argument("lowpass_rhs: tau must be positive");
    }
    return (dhat - d_filt) / tau;
}

}  // namespace smoco
