// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.
//
// Usage: acceptance <path-to-cli-binary> <path-to-configs-dir>

#include "smoco/config.hpp"
#include "smoco/metrics.hpp"
#include "smoco/observers.hpp"
#include "smoco/sim.hpp"
#include "smoco/synth.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

using namespace smoco;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::cout << "criterion " << criterion << ": " << (pass ? "PASS" : "FAIL")
              << " — " << detail << "\n";
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
}

// Generic fixed-step classical 4th-order integrator for the equivalence check.
Vector rk4(const std::function<Vector(double, const Vector&)>& f, Vector z,
           double dt, double t_end) {
    const long N = std::lround(t_end / dt);
    for (long k = 0; k < N; ++k) {
        const double t = k * dt;
        const Vector k1 = f(t, z);
        const Vector k2 = f(t + 0.5 * dt, z + 0.5 * dt * k1);
        const Vector k3 = f(t + 0.5 * dt, z + 0.5 * dt * k2);
        const Vector k4 = f(t + dt, z + dt * k3);
        z += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return z;
}

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(4);
    os << v;
    return os.str();
}

// --- criterion 1: augmentation equivalence --------------------------------

void criterion1(const RunConfig& cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    const PlantModel& plant = cfg.plant;
    const auto aug = build_augmented(plant, cfg.phi);
    const Matrix phi_inv = inverse(cfg.phi);
    const Matrix Bf = plant.Bf();

    DisturbanceSpec smooth;
    smooth.channels = {{DisturbanceComponent::sine(2.0, 1.0, 0.0)},
                       {DisturbanceComponent::sine(2.0, 1.0, 0.0)}};

    const Vector x0 = cfg.sim.x0;
    const double dt = 1e-4, t_end = 5.0;

    // Original form: xdot = A x + Bf d(t), open loop.
    const Vector xf = rk4(
        [&](double t, const Vector& x) {
            return Vector(plant.A * x + Bf * disturbance_eval(smooth, t));
        },
        x0, dt, t_end);

    // Augmented descriptor form driven by dbar = d + Phi^-1 ddot,
    // started from [x0; d(0)].
    Vector z0(6);
    z0.head(4) = x0;
    z0.tail(2) = disturbance_eval(smooth, 0.0);
    const Vector zf = rk4(
        [&](double t, const Vector& z) {
            const Vector dbar = disturbance_eval(smooth, t) +
                                phi_inv * disturbance_derivative(smooth, t);
            return Vector(aug.E_inv * (aug.A_bar * z + aug.Bf_bar * dbar));
        },
        z0, dt, t_end);

    const double dx = (zf.head(4) - xf).cwiseAbs().maxCoeff();
    const double dd =
        (zf.tail(2) - disturbance_eval(smooth, t_end)).cwiseAbs().maxCoeff();
    const double elapsed = seconds_since(t0);
    report(1, dx <= 1e-6 && dd <= 1e-6 && elapsed < 1.0,
           "augmentation equivalence: max|dx| = " + fmt(dx) + ", max|dd| = " +
               fmt(dd) + " (limit 1e-6), runtime " + fmt(elapsed) + " s (limit 1)");
}

// --- criteria 2-4: certificates --------------------------------------------

void criteria_2_3_4(const RunConfig& cfg, const AugmentedModel& aug) {
    const LmiRegion obs_region{M_PI / 3.0, 20.0, -10.0};
    const LmiRegion casc_region{M_PI / 3.0, 10.0, -6.0};

    GainSet gains;
    try {
        gains.L_bar =
            place_observer_gain(aug, default_region_poles(obs_region, 6));
        const auto t1 = certify_theorem1(aug, gains.L_bar);
        const double lam_min = -sym_eig_max(Matrix(-t1.P_bar));
        report(2,
               std::abs(t1.margin + 1.0) <= 1e-6 && lam_min > 0.0,
               "observer certificate: margin = " + fmt(t1.margin) +
                   " (want -1 +- 1e-6), lambda_min(P) = " + fmt(lam_min));

        gains.Lcal_bar =
            place_cascade_gain(aug, default_region_poles(casc_region, 6));
        const auto sg =
            solve_switch_gains(aug, cfg.plant.C_omega, gains.L_bar, t1.P_bar);
        gains.H1 = sg.H1;
        gains.H2 = sg.H2;
        gains.H3 = sg.H3;
    } catch (const std::exception& e) {
        report(2, false, std::string("synthesis failed: ") + e.what());
        report(3, false, "skipped (synthesis failed)");
        report(4, false, "skipped (synthesis failed)");
        return;
    }

    // Supplied stabilizing feedback gain, checked Hurwitz by eigendecomposition.
    if (!cfg.supplied.K.has_value()) {
        report(3, false, "example config is missing the feedback gain");
        report(4, false, "example config is missing the feedback gain");
        return;
    }
    gains.K = *cfg.supplied.K;
    double max_re = -1e300;
    for (const auto& ev : eig_all(Matrix(cfg.plant.A + cfg.plant.B * gains.K))) {
        max_re = std::max(max_re, ev.real());
    }
    const auto comp = compensator_gain(cfg.plant, gains.K);
    gains.B_dagger = comp.B_dagger;
    gains.K_bar = comp.K_bar;

    try {
        const auto smoco_cert =
            certify_closed_loop(aug, cfg.plant, gains, LoopMode::SMO_CO);
        report(3,
               smoco_cert.margin_theorem3 < 0.0 &&
                   smoco_cert.beta_theorem3 <= 1e12,
               "cascade-layer certificate: margin = " +
                   fmt(smoco_cert.margin_theorem3) + " at beta = " +
                   fmt(smoco_cert.beta_theorem3) + " (limit 1e12)");

        const auto smo_cert =
            certify_closed_loop(aug, cfg.plant, gains, LoopMode::SMO);
        const bool pass4 = max_re < 0.0 && smo_cert.pass &&
                           smo_cert.margin_closed_loop < 0.0 &&
                           smoco_cert.pass &&
                           smoco_cert.margin_closed_loop < 0.0;
        report(4, pass4,
               "closed-loop certificates: max Re(eig(A+BK)) = " + fmt(max_re) +
                   "; first-layer margin = " + fmt(smo_cert.margin_closed_loop) +
                   " at beta = " + fmt(smo_cert.beta) +
                   "; cascade margin = " + fmt(smoco_cert.margin_closed_loop) +
                   " at beta = " + fmt(smoco_cert.beta));
    } catch (const std::exception& e) {
        report(3, false, std::string("certificate failed: ") + e.what());
        report(4, false, std::string("certificate failed: ") + e.what());
    }
}

// --- criterion 5: error-dynamics consistency -------------------------------

double error_dynamics_residual(const RunConfig& base, const AugmentedModel& aug,
                               const GainSet& gains, double dt) {
    RunConfig cfg = base;
    cfg.bounds.omega_bar = 0.0;  // noise-free variant
    cfg.sim.dt = dt;
    cfg.sim.t_end = 1.0;
    cfg.sim.record_stride = 1;
    cfg.sim.mode = SimMode::BOTH;

    ControlLaw law{gains.K_bar, EstimateSource::SMO};
    const SwitchConfig sw = switch_config(cfg);
    const auto traj = integrate_closed_loop(cfg.plant, aug, gains, law,
                                            cfg.disturbance, sw, cfg.sim);
    const Matrix phi_inv = inverse(cfg.phi);

    double worst = 0.0;
    const auto N = static_cast<Eigen::Index>(traj.samples());
    // Fixed physical sample times past the initial transient so both step
    // sizes probe the same trajectory region.
    for (double ts = 0.3; ts < 0.96; ts += 0.05) {
        const auto k = static_cast<Eigen::Index>(std::lround(ts / dt));
        if (k + 1 >= N) break;
        const double t = traj.t[static_cast<std::size_t>(k)];
        auto ebar_at = [&](Eigen::Index i) {
            Vector e(6);
            e.head(4) = (traj.x.row(i) - traj.xhat.row(i)).transpose();
            e.tail(2) = (traj.d.row(i) - traj.dhat.row(i)).transpose();
            return e;
        };
        auto eps_at = [&](Eigen::Index i) {
            Vector e(6);
            e.head(4) = (traj.xhat.row(i) - traj.xtilde.row(i)).transpose();
            e.tail(2) = (traj.dhat.row(i) - traj.dtilde.row(i)).transpose();
            return e;
        };
        const Vector ebar = ebar_at(k);
        const Vector eps = eps_at(k);
        const Vector dbar = disturbance_eval(cfg.disturbance, t) +
                            phi_inv * disturbance_derivative(cfg.disturbance, t);

        // Switch terms as seen by the observers (w = 0).
        const Vector ey = aug.C_bar * ebar;
        const SwitchTerms st = switch_terms(gains, ey, sw);
        const Vector us3 = u_s3(gains.H3 * eps, sw);

        // Independently assembled error dynamics.
        const Vector ebar_dot_model =
            aug.E_inv * ((aug.A_bar - gains.L_bar * aug.C_bar) * ebar +
                         aug.Bf_bar * (dbar - st.us1) +
                         gains.L_bar * (cfg.plant.C_omega * st.us2));
        const Vector eps_dot_model =
            aug.E_inv * ((aug.A_bar - gains.Lcal_bar) * eps +
                         gains.L_bar * (aug.C_bar * ebar) -
                         gains.L_bar * (cfg.plant.C_omega * us3));

        const Vector ebar_fd = (ebar_at(k + 1) - ebar) / dt;
        const Vector eps_fd = (eps_at(k + 1) - eps) / dt;
        worst = std::max(worst, (ebar_fd - ebar_dot_model).cwiseAbs().maxCoeff());
        worst = std::max(worst, (eps_fd - eps_dot_model).cwiseAbs().maxCoeff());
    }
    return worst;
}

void criterion5(const RunConfig& base, const AugmentedModel& aug) {
    try {
        // Synthesize moderate-bandwidth gains from the pole regions; the
        // consistency check is about the coded dynamics, and softer gains
        // keep the truncation term of the finite difference in range.
        RunConfig cfg = base;
        cfg.supplied.L_bar.reset();
        cfg.supplied.Lcal_bar.reset();
        cfg.supplied.H1.reset();
        cfg.supplied.H2.reset();
        cfg.supplied.H3.reset();
        const GainSet gains = resolve_gains(cfg, aug);
        const double r1 = error_dynamics_residual(cfg, aug, gains, 1e-3);
        const double r2 = error_dynamics_residual(cfg, aug, gains, 5e-4);
        // Forward-difference residual is O(dt): halving dt should roughly
        // halve it.
        const bool pass = std::isfinite(r1) && std::isfinite(r2) &&
                          r2 < 0.75 * r1;
        report(5, pass,
               "error-dynamics consistency: residual " + fmt(r1) + " at dt=1e-3, " +
                   fmt(r2) + " at dt=5e-4 (want < 0.75x)");
    } catch (const std::exception& e) {
        report(5, false, std::string("failed: ") + e.what());
    }
}

// --- criterion 6: ordering reproduction ------------------------------------

void criterion6(const RunConfig& base, const AugmentedModel& aug) {
    try {
        const GainSet gains = resolve_gains(base, aug);
        const SwitchConfig sw = switch_config(base);
        bool pass = true;
        std::string detail = "orderings with >= 5% margin:";
        for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
            RunConfig cfg = base;
            cfg.sim.seed = seed;
            const auto t0 = std::chrono::steady_clock::now();
            ControlLaw law_smo{gains.K_bar, EstimateSource::SMO};
            const auto traj_smo = integrate_closed_loop(
                cfg.plant, aug, gains, law_smo, cfg.disturbance, sw, cfg.sim);
            ControlLaw law_co{gains.K_bar, EstimateSource::SMO_CO};
            const auto traj_co = integrate_closed_loop(
                cfg.plant, aug, gains, law_co, cfg.disturbance, sw, cfg.sim);
            const double elapsed = seconds_since(t0) / 2.0;
            const auto rep = build_report(traj_smo, traj_co, cfg.sim.window_lo,
                                          cfg.sim.window_hi);
            const bool ok = rep.err_smoco <= 0.95 * rep.err_smo &&
                            rep.u_smoco <= 0.95 * rep.u_smo && elapsed < 30.0;
            pass = pass && ok;
            detail += " [seed " + std::to_string(seed) + ": err " +
                      fmt(rep.err_smoco) + " vs " + fmt(rep.err_smo) + ", u " +
                      fmt(rep.u_smoco) + " vs " + fmt(rep.u_smo) + ", " +
                      fmt(elapsed) + " s/run]";
        }
        report(6, pass, detail);
    } catch (const std::exception& e) {
        report(6, false, std::string("failed: ") + e.what());
    }
}

// --- criterion 7: step-disturbance estimation -------------------------------

void criterion7(const fs::path& configs) {
    try {
        const RunConfig cfg = load_config((configs / "estimation.json").string());
        const auto aug = build_augmented(cfg.plant, cfg.phi);
        const GainSet gains = resolve_gains(cfg, aug);
        const SwitchConfig sw = switch_config(cfg);
        ControlLaw law{gains.K_bar, EstimateSource::SMO_CO};
        const auto traj = integrate_closed_loop(cfg.plant, aug, gains, law,
                                                cfg.disturbance, sw, cfg.sim);

        // Step of level 5 on channel 2 at t = 10 s; band is 5% of the level.
        const double band = 0.25;
        const auto N = static_cast<Eigen::Index>(traj.samples());
        double settle = -1.0;
        double worst_after = 0.0;
        for (Eigen::Index k = N - 1; k >= 0; --k) {
            const double t = traj.t[static_cast<std::size_t>(k)];
            if (t < 10.0) break;
            const double err = std::abs(traj.d(k, 1) - traj.dtilde(k, 1));
            if (err > band) {
                settle = traj.t[static_cast<std::size_t>(k + 1 < N ? k + 1 : k)];
                break;
            }
            worst_after = std::max(worst_after, err);
        }
        if (settle < 0.0) settle = 10.0;  // inside the band from the onset on
        const bool pass = settle <= 11.0;
        report(7, pass,
               "step estimation: |d2 - dtilde2| enters the 5% band at t = " +
                   fmt(settle) + " s (limit 11) and stays below " +
                   fmt(worst_after) + " through 30 s");
    } catch (const std::exception& e) {
        report(7, false, std::string("failed: ") + e.what());
    }
}

// --- criterion 8: compensation identity -------------------------------------

void criterion8(const RunConfig& cfg) {
    const auto comp = compensator_gain(cfg.plant, *cfg.supplied.K);
    const Matrix Bf = cfg.plant.Bf();
    const double id_err =
        (cfg.plant.B * comp.B_dagger * Bf - Bf).cwiseAbs().maxCoeff();

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unif(-10.0, 10.0);
    double cancel_err = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        Vector est(6);
        for (int i = 0; i < 6; ++i) est(i) = unif(rng);
        const Vector u = comp.K_bar * est;
        const Vector lhs = cfg.plant.B * u + Bf * est.tail(2);
        const Vector rhs = cfg.plant.B * (*cfg.supplied.K * est.head(4));
        cancel_err = std::max(
            cancel_err, (lhs - rhs).cwiseAbs().maxCoeff() /
                            std::max(1.0, rhs.cwiseAbs().maxCoeff()));
    }
    report(8, id_err <= 1e-10 && cancel_err <= 1e-9,
           "compensation identity: |B Bdag Bf - Bf| = " + fmt(id_err) +
               " (limit 1e-10), cancellation residual = " + fmt(cancel_err) +
               " (limit 1e-9)");
}

// --- criterion 9: CLI determinism -------------------------------------------

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void criterion9(const std::string& cli, const fs::path& configs) {
    const fs::path out_a = fs::temp_directory_path() / "smoco_accept_a";
    const fs::path out_b = fs::temp_directory_path() / "smoco_accept_b";
    fs::remove_all(out_a);
    fs::remove_all(out_b);
    const std::string base = "\"" + cli + "\" simulate --config \"" +
                             (configs / "example.json").string() +
                             "\" --mode smo --seed 7 --t-end 2 --out ";
    const int rc1 = std::system((base + "\"" + out_a.string() + "\" > /dev/null").c_str());
    const int rc2 = std::system((base + "\"" + out_b.string() + "\" > /dev/null").c_str());
    const std::string csv_a = slurp(out_a / "traj_smo.csv");
    const std::string csv_b = slurp(out_b / "traj_smo.csv");
    const bool pass =
        rc1 == 0 && rc2 == 0 && !csv_a.empty() && csv_a == csv_b;
    report(9, pass,
           "determinism: two CLI runs with the same config and seed produced " +
               std::string(csv_a == csv_b && !csv_a.empty()
                               ? "byte-identical CSVs"
                               : "DIFFERENT output") +
               " (exit codes " + std::to_string(rc1) + ", " +
               std::to_string(rc2) + ")");
    fs::remove_all(out_a);
    fs::remove_all(out_b);
}

// --- criterion 10: noise-free, disturbance-free convergence ------------------

void criterion10(const RunConfig& base, const AugmentedModel& aug) {
    try {
        RunConfig cfg = base;
        cfg.bounds.omega_bar = 0.0;
        cfg.disturbance.channels = {{DisturbanceComponent::constant(0.0)},
                                    {DisturbanceComponent::constant(0.0)}};
        cfg.sim.t_end = 5.0;
        cfg.sim.dt = 1e-4;
        cfg.sim.record_stride = 100;

        const GainSet gains = resolve_gains(cfg, aug);
        const auto cert = certify_closed_loop(aug, cfg.plant, gains,
                                              LoopMode::SMO_CO);
        const SwitchConfig sw = switch_config(cfg);
        ControlLaw law{gains.K_bar, EstimateSource::SMO};
        const auto traj = integrate_closed_loop(cfg.plant, aug, gains, law,
                                                cfg.disturbance, sw, cfg.sim);
        const auto last = static_cast<Eigen::Index>(traj.samples()) - 1;
        Vector e0(6), ef(6);
        e0.head(4) = (traj.x.row(0) - traj.xhat.row(0)).transpose();
        e0.tail(2) = (traj.d.row(0) - traj.dhat.row(0)).transpose();
        ef.head(4) = (traj.x.row(last) - traj.xhat.row(last)).transpose();
        ef.tail(2) = (traj.d.row(last) - traj.dhat.row(last)).transpose();
        const double ratio = ef.norm() / e0.norm();
        report(10, cert.pass && ratio <= 1e-3,
               "noise-free convergence: certificate " +
                   std::string(cert.pass ? "passes" : "FAILS") +
                   ", |e(5)| / |e(0)| = " + fmt(ratio) + " (limit 1e-3)");
    } catch (const std::exception& e) {
        report(10, false, std::string("failed: ") + e.what());
    }
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 3) {
        std::cerr << "usage: acceptance <cli-binary> <configs-dir>\n";
        return 2;
    }
    const std::string cli = argv[1];
    const fs::path configs = argv[2];

    const RunConfig cfg = load_config((configs / "example.json").string());
    const auto aug = build_augmented(cfg.plant, cfg.phi);

    criterion1(cfg);
    criteria_2_3_4(cfg, aug);
    criterion5(cfg, aug);
    criterion6(cfg, aug);
    criterion7(configs);
    criterion8(cfg);
    criterion9(cli, configs);
    criterion10(cfg, aug);

    std::cout << (g_failures == 0 ? "all criteria passed"
                                  : std::to_string(g_failures) +
                                        " criterion(s) failed")
              << "\n";
    return g_failures == 0 ? 0 : 1;
}
