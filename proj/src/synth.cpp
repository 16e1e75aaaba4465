#include "smoco/synth.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

namespace smoco {

namespace {

constexpr double kPoleMatchTol = 1e-6;

bool spectra_match(std::vector<std::complex<double>> a,
                   std::vector<std::complex<double>> b, double tol) {
    if (a.size() != b.size()) return false;
    auto cmp = [](const std::complex<double>& x, const std::complex<double>& y) {
        if (x.real() != y.real()) return x.real() < y.real();
        return x.imag() < y.imag();
    };
    std::sort(a.begin(), a.end(), cmp);
    std::sort(b.begin(), b.end(), cmp);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double scale = std::max({std::abs(a[i]), std::abs(b[i]), 1.0});
        if (std::abs(a[i] - b[i]) > tol * scale) return false;
    }
    return true;
}

// Real block-diagonal realization of a self-conjugate spectrum: 1x1 blocks
// for real poles, [[a, b], [-b, a]] for conjugate pairs.
Matrix real_block_realization(const std::vector<std::complex<double>>& poles) {
    const int nn = static_cast<int>(poles.size());
    Matrix D = Matrix::Zero(nn, nn);
    std::vector<bool> used(poles.size(), false);
    int idx = 0;
    for (std::size_t i = 0; i < poles.size(); ++i) {
        if (used[i]) continue;
        const double scale = std::max(std::abs(poles[i]), 1.0);
        if (std::abs(poles[i].imag()) <= 1e-12 * scale) {
            D(idx, idx) = poles[i].real();
            used[i] = true;
            ++idx;
            continue;
        }
        bool paired = false;
        for (std::size_t j = i + 1; j < poles.size(); ++j) {
            if (used[j]) continue;
            if (std::abs(poles[j] - std::conj(poles[i])) <= 1e-9 * scale) {
                const double a = poles[i].real();
                const double b = std::abs(poles[i].imag());
                D(idx, idx) = a;
                D(idx, idx + 1) = b;
                D(idx + 1, idx) = -b;
                D(idx + 1, idx + 1) = a;
                used[i] = used[j] = true;
                idx += 2;
                paired = true;
                break;
            }
        }
        if (!paired) {
            throw std::invalid_argument("pole list is not closed under conjugation");
        }
    }
    return D;
}

// Real monic polynomial coefficients (descending degree) from a
// self-conjugate root list.
std::vector<double> poly_from_roots(const std::vector<std::complex<double>>& roots) {
    std::vector<std::complex<double>> c{1.0};
    for (const auto& r : roots) {
        c.push_back(0.0);
        for (std::size_t k = c.size() - 1; k >= 1; --k) c[k] -= r * c[k - 1];
    }
    std::vector<double> out(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) out[i] = c[i].real();
    return out;
}

// Ackermann's formula for single-input pairs: eig(A + b*K) = poles.
Matrix place_single_input(const Matrix& A, const Matrix& b,
                          const std::vector<std::complex<double>>& poles) {
    const int nn = static_cast<int>(A.rows());
    Matrix ctrb(nn, nn);
    Matrix col = b;
    for (int k = 0; k < nn; ++k) {
        ctrb.col(k) = col;
        col = A * col;
    }
    const auto coeffs = poly_from_roots(poles);
    Matrix pA = Matrix::Zero(nn, nn);
    for (double c : coeffs) {
        pA = pA * A + c * Matrix::Identity(nn, nn);
    }
    const Vector en = Vector::Unit(nn, nn - 1);
    const Vector row = inverse(ctrb).transpose() * en;
    return -(row.transpose() * pA);
}

}  // namespace

bool region_contains(const LmiRegion& region, std::complex<double> pole) {
    if (pole.real() >= region.shift) return false;
    if (std::abs(pole) >= region.radius) return false;
    return std::abs(std::arg(-pole)) < region.half_angle;
}

std::vector<std::complex<double>> default_region_poles(const LmiRegion& region,
                                                       int count) {
    std::vector<std::complex<double>> poles(count);
    const double lo = region.shift * 1.05;
    const double hi = -0.9 * region.radius;
    for (int i = 0; i < count; ++i) {
        const double t = count > 1 ? static_cast<double>(i) / (count - 1) : 0.0;
        poles[i] = lo + t * (hi - lo);
    }
    for (const auto& pl : poles) {
        if (!region_contains(region, pl)) {
            throw std::invalid_argument("default_region_poles: sampled pole falls outside the region");
        }
    }
    return poles;
}

Matrix place_pair(const Matrix& A, const Matrix& B,
                  const std::vector<std::complex<double>>& poles) {
    const int nn = static_cast<int>(A.rows());
    const int mm = static_cast<int>(B.cols());
    if (static_cast<int>(poles.size()) != nn) {
        throw std::invalid_argument("place_pair: need exactly n poles");
    }
    // Requested spectrum already realized: zero gain is admissible.
    if (spectra_match(eig_all(A), poles, 1e-9)) {
        return Matrix::Zero(mm, nn);
    }
    if (mm == 1) {
        const Matrix K = place_single_input(A, B, poles);
        if (!spectra_match(eig_all(A + B * K), poles, kPoleMatchTol)) {
            throw std::runtime_error("place_pair: placement verification failed (single input)");
        }
        return K;
    }
    const Matrix D = real_block_realization(poles);
    // Sylvester approach: pick a parameter matrix G, solve A X - X D = -B G,
    // then K = G X^-1 assigns eig(A + B K) = eig(D).
    const Matrix I = Matrix::Identity(nn, nn);
    const Matrix sys = kron(I, A) - kron(D.transpose(), I);
    std::mt19937_64 rng(0x5b5f0c1d2e3a4751ull);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    for (int attempt = 0; attempt < 50; ++attempt) {
        Matrix G(mm, nn);
        for (int i = 0; i < mm; ++i) {
            for (int j = 0; j < nn; ++j) G(i, j) = unif(rng);
        }
        Eigen::VectorXd rhs(nn * nn);
        const Matrix BG = -B * G;
        for (int j = 0; j < nn; ++j) rhs.segment(j * nn, nn) = BG.col(j);
        const Eigen::VectorXd xv = sys.partialPivLu().solve(rhs);
        Matrix X(nn, nn);
        for (int j = 0; j < nn; ++j) X.col(j) = xv.segment(j * nn, nn);
        Eigen::JacobiSVD<Matrix> svd(X);
        const auto& sv = svd.singularValues();
        if (sv(sv.size() - 1) <= 0.0 || sv(0) / sv(sv.size() - 1) > 1e8) {
            continue;
        }
        const Matrix K = G * inverse(X);
        if (spectra_match(eig_all(A + B * K), poles, kPoleMatchTol)) {
            return K;
        }
    }
    throw std::runtime_error("place_pair: no well-conditioned eigenvector assignment found (pair may be uncontrollable for this spectrum)");
}

Matrix place_observer_gain(const AugmentedModel& aug,
                           const std::vector<std::complex<double>>& poles) {
    const Matrix F = aug.F();
    // Dual placement: eig(F^T + C_bar^T Kd) = poles, then
    // L_bar = E_bar * (-Kd^T) gives eig(E^-1 (A_bar - L_bar C_bar)) = poles.
    const Matrix Kd = place_pair(F.transpose(), aug.C_bar.transpose(), poles);
    const Matrix L_bar = aug.E_bar * (-Kd.transpose());
    const Matrix closed = aug.E_inv * (aug.A_bar - L_bar * aug.C_bar);
    if (!spectra_match(eig_all(closed), poles, kPoleMatchTol)) {
        throw std::runtime_error("place_observer_gain: pole verification failed");
    }
    return L_bar;
}

Matrix place_cascade_gain(const AugmentedModel& aug,
                          const std::vector<std::complex<double>>& poles) {
    if (static_cast<int>(poles.size()) != aug.n + aug.m) {
        throw std::invalid_argument("place_cascade_gain: need n+m poles");
    }
    if (spectra_match(eig_all(aug.F()), poles, 1e-9)) {
        return Matrix::Zero(aug.n + aug.m, aug.n + aug.m);
    }
    const Matrix D = real_block_realization(poles);
    // Full-state injection, so placement is exact by construction.
    const Matrix Lcal = aug.A_bar - aug.E_bar * D;
    const Matrix closed = aug.E_inv * (aug.A_bar - Lcal);
    if (!spectra_match(eig_all(closed), poles, kPoleMatchTol)) {
        throw std::runtime_error("place_cascade_gain: pole verification failed");
    }
    return Lcal;
}

Theorem1Result certify_theorem1(const AugmentedModel& aug,
                                const Matrix& L_bar) {
    const Matrix closed = aug.E_inv * (aug.A_bar - L_bar * aug.C_bar);
    for (const auto& ev : eig_all(closed)) {
        if (ev.real() >= 0.0) {
            std::ostringstream os;
            os << "certify_theorem1: observer matrix not Hurwitz, eigenvalue "
               << ev.real() << (ev.imag() >= 0 ? "+" : "") << ev.imag() << "i";
            throw std::invalid_argument(os.str());
        }
    }
    Theorem1Result out;
    out.P_bar = solve_lyapunov(closed, Matrix::Identity(aug.n + aug.m, aug.n + aug.m));
    out.N1 = out.P_bar * aug.E_inv * L_bar;
    const Matrix PA = out.P_bar * aug.E_inv * aug.A_bar;
    const Matrix NC = out.N1 * aug.C_bar;
    out.margin = sym_eig_max(PA + PA.transpose() - NC - NC.transpose());
    return out;
}

namespace {

double schur_certificate_margin(const Matrix& R, double mu) {
    // [[-mu^2 I, R], [R^T, -I]] <= 0 certifies ||R|| <= mu.
    const Matrix top_left = -mu * mu * Matrix::Identity(R.rows(), R.rows());
    const Matrix bottom_right = -Matrix::Identity(R.cols(), R.cols());
    const Matrix S = block_assemble({{top_left, R}, {Matrix(R.transpose()), bottom_right}});
    return sym_eig_max(S);
}

}  // namespace

SwitchGains solve_switch_gains(const AugmentedModel& aug,
                               const Matrix& C_omega, const Matrix& L_bar,
                               const Matrix& P_bar) {
    SwitchGains out;
    const Matrix Ct = aug.C_bar.transpose();

    const Matrix target1 = P_bar * aug.E_inv * aug.Bf_bar;
    const auto sol1 = lstsq(Ct, target1);
    out.H1 = sol1.X.transpose();
    out.mu1 = sol1.residual;

    const Matrix target2 = P_bar * aug.E_inv * L_bar * C_omega;
    const auto sol2 = lstsq(Ct, target2);
    out.H2 = sol2.X.transpose();
    out.mu2 = sol2.residual;

    // No output-map restriction on H3, so the constraint is met exactly.
    out.H3 = target2.transpose();
    out.mu3 = 0.0;

    out.c_bar_rank_deficient = sol1.rank_deficient || sol2.rank_deficient;
    out.schur_margin1 =
        schur_certificate_margin(Matrix((out.H1 * aug.C_bar).transpose() - target1), out.mu1);
    out.schur_margin2 =
        schur_certificate_margin(Matrix((out.H2 * aug.C_bar).transpose() - target2), out.mu2);
    return out;
}

Matrix place_state_feedback(const PlantModel& plant,
                            const std::vector<std::complex<double>>& poles) {
    return place_pair(plant.A, plant.B, poles);
}

CompensatorGain compensator_gain(const PlantModel& plant, const Matrix& K) {
    CompensatorGain out;
    out.B_dagger = pseudo_inverse(plant.B);
    const Matrix Bf = plant.Bf();
    const double id_err =
        (plant.B * out.B_dagger * Bf - Bf).cwiseAbs().maxCoeff();
    if (id_err > Tol::gain_identity * std::max(Bf.cwiseAbs().maxCoeff(), 1.0)) {
        throw std::runtime_error("compensator_gain: B * B_dagger * B_f != B_f (B lacks full column rank?)");
    }
    out.K_bar = Matrix(plant.m(), plant.n() + plant.m());
    out.K_bar.block(0, 0, plant.m(), plant.n()) = K;
    out.K_bar.block(0, plant.n(), plant.m(), plant.m()) = -out.B_dagger * Bf;
    return out;
}

Certificate certify_closed_loop(const AugmentedModel& aug,
                                const PlantModel& plant, const GainSet& gains,
                                LoopMode mode) {
    constexpr double kBetaLimit = 1e12;
    const int n = plant.n();
    const int nm = aug.n + aug.m;

    Certificate cert;
    const auto th1 = certify_theorem1(aug, gains.L_bar);
    cert.P_bar = th1.P_bar;
    cert.margin_theorem1 = th1.margin;
    cert.pole_report.observer_poles =
        eig_all(aug.E_inv * (aug.A_bar - gains.L_bar * aug.C_bar));

    const Matrix Acl = plant.A + plant.B * gains.K;
    for (const auto& ev : eig_all(Acl)) {
        if (ev.real() >= 0.0) {
            throw std::invalid_argument("certify_closed_loop: A + B*K is not Hurwitz");
        }
    }
    cert.pole_report.controller_poles = eig_all(Acl);
    cert.Q = solve_lyapunov(Acl, Matrix::Identity(n, n));

    // Observer-error diagonal block of the assembled inequality; equals -I
    // by the Lyapunov construction.
    const Matrix PA = th1.P_bar * aug.E_inv * aug.A_bar;
    const Matrix NC = th1.N1 * aug.C_bar;
    const Matrix Xi_obs = PA + PA.transpose() - NC - NC.transpose();

    const Matrix X11 = Matrix(cert.Q * Acl + Acl.transpose() * cert.Q);
    const Matrix X12 = Matrix(-cert.Q * plant.B * gains.K_bar);

    if (mode == LoopMode::SMO) {
        cert.N1 = th1.N1;
        double beta = 1.0;
        double margin = sym_eig_max(
            block_assemble({{X11, X12}, {Matrix(X12.transpose()), Xi_obs}}));
        while (margin >= 0.0 && beta <= kBetaLimit) {
            beta *= 2.0;
            margin = sym_eig_max(block_assemble(
                {{X11, X12}, {Matrix(X12.transpose()), Matrix(beta * Xi_obs)}}));
        }
        cert.beta = beta;
        cert.margin_closed_loop = margin;
        cert.pass = margin < 0.0 && th1.margin < 0.0;
        return cert;
    }

    // Cascade layer: per-block Lyapunov matrix for the eps dynamics.
    const Matrix closed_eps = aug.E_inv * (aug.A_bar - gains.Lcal_bar);
    for (const auto& ev : eig_all(closed_eps)) {
        if (ev.real() >= 0.0) {
            throw std::invalid_argument("certify_closed_loop: cascade matrix not Hurwitz");
        }
    }
    cert.pole_report.cascade_poles = eig_all(closed_eps);
    const Matrix P_eps =
        solve_lyapunov(closed_eps, Matrix::Identity(nm, nm));
    cert.N1 = P_eps * aug.E_inv * gains.L_bar;
    cert.N2 = P_eps * aug.E_inv * gains.Lcal_bar;

    const Matrix PepsA = P_eps * aug.E_inv * aug.A_bar;
    const Matrix Xi_eps =
        PepsA + PepsA.transpose() - cert.N2 - cert.N2.transpose();
    const Matrix cross = Matrix((cert.N1 * aug.C_bar).transpose());  // (e, eps) coupling

    // Joint error certificate: scale the first-layer block until the 2x2
    // block matrix is negative definite.
    double beta3 = 1.0;
    double margin3 = sym_eig_max(block_assemble(
        {{Xi_obs, cross}, {Matrix(cross.transpose()), Xi_eps}}));
    while (margin3 >= 0.0 && beta3 <= kBetaLimit) {
        beta3 *= 2.0;
        margin3 = sym_eig_max(block_assemble(
            {{Matrix(beta3 * Xi_obs), cross}, {Matrix(cross.transpose()), Xi_eps}}));
    }
    cert.beta_theorem3 = beta3;
    cert.margin_theorem3 = margin3;

    // Full closed loop: [x, e, eps] blocks with the joint error certificate
    // scaled as one unit.
    double beta = 1.0;
    double margin = 0.0;
    while (true) {
        const Matrix X22 = beta * beta3 * Xi_obs;
        const Matrix X23 = beta * cross;
        const Matrix X33 = beta * Xi_eps;
        margin = sym_eig_max(block_assemble(
            {{X11, X12, X12},
             {Matrix(X12.transpose()), X22, X23},
             {Matrix(X12.transpose()), Matrix(X23.transpose()), X33}}));
        if (margin < 0.0 || beta > kBetaLimit) break;
        beta *= 2.0;
    }
    cert.beta = beta;
    cert.margin_closed_loop = margin;
    cert.pass = th1.margin < 0.0 && margin3 < 0.0 && margin < 0.0;
    return cert;
}

double stationary_noise_std(const Matrix& F, const Matrix& B_w,
                            const Vector& sel, double dt, double noise_var) {
    const int nn = static_cast<int>(F.rows());
    const Matrix I = Matrix::Identity(nn, nn);
    const Matrix hF = dt * F;
    const Matrix hF2 = hF * hF;
    const Matrix hF3 = hF2 * hF;
    // One-step map of the classical 4th-order scheme with zero-order-hold
    // input.
    const Matrix Ad = I + hF + hF2 / 2.0 + hF3 / 6.0 + hF3 * hF / 24.0;
    const Matrix Bd = dt * (I + hF / 2.0 + hF2 / 6.0 + hF3 / 24.0) * B_w;
    for (const auto& ev : eig_all(Ad)) {
        if (std::abs(ev) >= 1.0) {
            throw std::invalid_argument("stationary_noise_std: discrete map is not stable at this step");
        }
    }
    const Matrix Qd = noise_var * Bd * Bd.transpose();
    // Sigma = Ad Sigma Ad^T + Qd via vectorization.
    const Matrix sys = Matrix::Identity(nn * nn, nn * nn) - kron(Ad, Ad);
    Eigen::VectorXd rhs(nn * nn);
    for (int j = 0; j < nn; ++j) rhs.segment(j * nn, nn) = Qd.col(j);
    const Eigen::VectorXd sv = sys.partialPivLu().solve(rhs);
    Matrix Sigma(nn, nn);
    for (int j = 0; j < nn; ++j) Sigma.col(j) = sv.segment(j * nn, nn);
    Sigma = 0.5 * (Sigma + Sigma.transpose());
    return std::sqrt(std::max(0.0, double(sel.transpose() * Sigma * sel)));
}

}  // namespace smoco
