#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "fixture.hpp"
#include "smoco/sim.hpp"

#include <cstdio>
#include <fstream>

using namespace smoco;

namespace {

struct Bundle {
    PlantModel plant;
    AugmentedModel aug;
    GainSet gains;
    ControlLaw law;
    SwitchConfig sw;
};

Bundle example_bundle() {
    Bundle b;
    b.plant = testing::example_plant();
    b.aug = testing::example_aug();
    b.gains.L_bar = place_observer_gain(
        b.aug, default_region_poles({M_PI / 3.0, 20.0, -10.0}, 6));
    b.gains.Lcal_bar = place_cascade_gain(
        b.aug, default_region_poles({M_PI / 3.0, 10.0, -6.0}, 6));
    const auto t1 = certify_theorem1(b.aug, b.gains.L_bar);
    b.gains.K = place_state_feedback(
        b.plant, {{-2, 0}, {-3, 0}, {-4, 0}, {-5, 0}});
    const auto comp = compensator_gain(b.plant, b.gains.K);
    b.gains.B_dagger = comp.B_dagger;
    b.gains.K_bar = comp.K_bar;
    const auto sg2 = solve_switch_gains(b.aug, b.plant.C_omega, b.gains.L_bar,
                                        t1.P_bar);
    b.gains.H1 = sg2.H1;
    b.gains.H2 = sg2.H2;
    b.gains.H3 = sg2.H3;
    b.law = {b.gains.K_bar, EstimateSource::SMO};
    b.sw.varsigma = 0.01;
    b.sw.switch_gain = 1000.0;
    b.sw.omega_bar = 1.0;
    return b;
}

SimConfig short_sim(double dt, double t_end) {
    SimConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.seed = 1;
    cfg.x0 = testing::example_x0();
    cfg.mode = SimMode::BOTH;
    cfg.window_lo = 0.0;
    cfg.window_hi = t_end;
    return cfg;
}

}  // namespace

TEST_CASE("disturbance evaluation and analytic derivative") {
    const auto spec = testing::example_disturbance();
    // channel 1: 5 sin(t); channel 2: step to 5 at t = 10
    CHECK(disturbance_eval(spec, 0.0)(0) == doctest::Approx(0.0));
    CHECK(disturbance_eval(spec, M_PI / 2)(0) == doctest::Approx(5.0));
    CHECK(disturbance_eval(spec, 9.999)(1) == doctest::Approx(0.0));
    CHECK(disturbance_eval(spec, 10.0)(1) == doctest::Approx(5.0));
    CHECK(disturbance_eval(spec, 30.0)(1) == doctest::Approx(5.0));

    CHECK(disturbance_derivative(spec, 0.0)(0) == doctest::Approx(5.0));
    CHECK(disturbance_derivative(spec, M_PI)(0) == doctest::Approx(-5.0));
    CHECK(disturbance_derivative(spec, 15.0)(1) == doctest::Approx(0.0));

    DisturbanceSpec combo;
    combo.channels = {{DisturbanceComponent::constant(2.0),
                       DisturbanceComponent::sine(1.0, 3.0, 0.5)}};
    CHECK(disturbance_eval(combo, 1.2)(0) ==
          doctest::Approx(2.0 + std::sin(3.0 * 1.2 + 0.5)));
    CHECK(disturbance_derivative(combo, 1.2)(0) ==
          doctest::Approx(3.0 * std::cos(3.0 * 1.2 + 0.5)));
}

TEST_CASE("noise stream is deterministic per seed and differs across seeds") {
    const Matrix cw = testing::example_plant().C_omega;
    std::mt19937_64 a(42), b(42), c(43);
    bool all_equal = true;
    bool any_diff_seed = false;
    for (int k = 0; k < 100; ++k) {
        const Vector wa = noise_sample(a, cw, 1.0);
        const Vector wb = noise_sample(b, cw, 1.0);
        const Vector wc = noise_sample(c, cw, 1.0);
        if ((wa - wb).cwiseAbs().maxCoeff() != 0.0) all_equal = false;
        if ((wa - wc).cwiseAbs().maxCoeff() != 0.0) any_diff_seed = true;
        CHECK(wa.cwiseAbs().maxCoeff() <= 1.0);
    }
    CHECK(all_equal);
    CHECK(any_diff_seed);
}

TEST_CASE("clipped noise standard deviation matches the analytic value") {
    const Matrix cw = testing::example_plant().C_omega;
    std::mt19937_64 rng(7);
    const int draws = 100000;
    double sum = 0.0, sumsq = 0.0;
    for (int k = 0; k < draws; ++k) {
        const Vector w = noise_sample(rng, cw, 1.0);
        for (int i = 0; i < 2; ++i) {
            sum += w(i);
            sumsq += w(i) * w(i);
        }
    }
    const double n = 2.0 * draws;
    const double mean = sum / n;
    const double std = std::sqrt(sumsq / n - mean * mean);
    // Standard normal truncated by clipping (not rejection) at +-1:
    // E[X^2] = 1 - 2 phi(1) + 2 (1 - Phi(1)) with phi/Phi the standard
    // normal pdf/cdf, giving sigma = 0.71875 (mean 0 by symmetry).
    CHECK(std::abs(mean) < 0.01);
    CHECK(std == doctest::Approx(0.71875).epsilon(0.03));

    // With a wide clip the stream is standard normal.
    std::mt19937_64 rng2(8);
    double sumsq2 = 0.0;
    for (int k = 0; k < draws; ++k) {
        const Vector w = noise_sample(rng2, cw, 50.0);
        sumsq2 += w.squaredNorm();
    }
    CHECK(std::sqrt(sumsq2 / n) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("all-zero initial data stays at the origin") {
    Bundle b = example_bundle();
    b.sw.omega_bar = 0.0;  // clip to zero: noise-free
    DisturbanceSpec quiet;
    quiet.channels = {{DisturbanceComponent::constant(0.0)},
                      {DisturbanceComponent::constant(0.0)}};
    SimConfig cfg = short_sim(1e-3, 0.5);
    cfg.x0 = Vector::Zero(4);
    const auto traj = integrate_closed_loop(b.plant, b.aug, b.gains, b.law,
                                            quiet, b.sw, cfg);
    CHECK(traj.x.cwiseAbs().maxCoeff() == 0.0);
    CHECK(traj.xhat.cwiseAbs().maxCoeff() == 0.0);
    CHECK(traj.xtilde.cwiseAbs().maxCoeff() == 0.0);
    CHECK(traj.u.cwiseAbs().maxCoeff() == 0.0);
    CHECK(traj.y.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("recorded u equals the control law applied to the recorded estimate") {
    Bundle b = example_bundle();
    SimConfig cfg = short_sim(1e-3, 0.2);
    const auto traj = integrate_closed_loop(b.plant, b.aug, b.gains, b.law,
                                            testing::example_disturbance(),
                                            b.sw, cfg);
    REQUIRE(traj.samples() > 10);
    for (std::size_t k = 0; k < traj.samples(); k += 37) {
        Vector est(6);
        est.head(4) = traj.xhat.row(static_cast<Eigen::Index>(k)).transpose();
        est.tail(2) = traj.dhat.row(static_cast<Eigen::Index>(k)).transpose();
        const Vector u = b.gains.K_bar * est;
        CHECK((u.transpose() - traj.u.row(static_cast<Eigen::Index>(k)))
                  .cwiseAbs()
                  .maxCoeff() < 1e-12 * std::max(1.0, u.cwiseAbs().maxCoeff()));
    }
    // y = C x + C_omega * omega at every record
    const Matrix y_expected = traj.x * b.plant.C.transpose() +
                              traj.omega * b.plant.C_omega.transpose();
    CHECK((traj.y - y_expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("observer_init seeds both observer layers") {
    Bundle b = example_bundle();
    SimConfig cfg = short_sim(1e-3, 0.01);
    Vector init(6);
    init << 1, 2, 3, 4, 0.5, -0.5;
    cfg.observer_init = init;
    const auto traj = integrate_closed_loop(b.plant, b.aug, b.gains, b.law,
                                            testing::example_disturbance(),
                                            b.sw, cfg);
    CHECK((traj.xhat.row(0).transpose() - init.head(4)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((traj.xtilde.row(0).transpose() - init.head(4)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((traj.dhat.row(0).transpose() - init.tail(2)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((traj.dtilde.row(0).transpose() - init.tail(2)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("record stride subsamples the grid without changing the states") {
    Bundle b = example_bundle();
    SimConfig dense = short_sim(1e-3, 0.2);
    SimConfig coarse = dense;
    coarse.record_stride = 10;
    const auto td = integrate_closed_loop(b.plant, b.aug, b.gains, b.law,
                                          testing::example_disturbance(), b.sw,
                                          dense);
    const auto tc = integrate_closed_loop(b.plant, b.aug, b.gains, b.law,
                                          testing::example_disturbance(), b.sw,
                                          coarse);
    REQUIRE(tc.samples() * 10 <= td.samples() + 10);
    for (std::size_t k = 0; k < tc.samples(); ++k) {
        CHECK(tc.t[k] == doctest::Approx(td.t[10 * k]));
        CHECK((tc.x.row(static_cast<Eigen::Index>(k)) -
               td.x.row(static_cast<Eigen::Index>(10 * k)))
                  .cwiseAbs()
                  .maxCoeff() == 0.0);
    }
}

TEST_CASE("step-halving shrinks the integration error") {
    Bundle b = example_bundle();
    b.sw.omega_bar = 0.0;  // noise-free so the solution is smooth
    auto final_x = [&](double dt) {
        SimConfig cfg = short_sim(dt, 0.5);
        const auto traj = integrate_closed_loop(b.plant, b.aug, b.gains, b.law,
                                                testing::example_disturbance(),
                                                b.sw, cfg);
        return Vector(traj.x.bottomRows(1).transpose());
    };
    // The zero-order hold on u limits the scheme to first-order accuracy, so
    // halving dt should roughly halve the error against a fine reference.
    const Vector ref = final_x(1.25e-4);
    const double e1 = (final_x(1e-3) - ref).norm();
    const double e2 = (final_x(5e-4) - ref).norm();
    CHECK(e2 < e1);
    CHECK(e1 / std::max(e2, 1e-300) > 1.5);
    CHECK(e2 < 1e-2 * std::max(1.0, ref.norm()));
}

TEST_CASE("divergence aborts with a step-stamped error") {
    PlantModel plant;
    plant.A = Matrix::Constant(1, 1, 5.0);
    plant.B = Matrix::Constant(1, 1, 1.0);
    plant.C = Matrix::Constant(1, 1, 1.0);
    plant.Lambda = Matrix::Constant(1, 1, 1.0);
    plant.C_omega = Matrix::Constant(1, 1, 1.0);
    const auto aug = build_augmented(plant, Matrix::Constant(1, 1, 0.1));

    GainSet g;
    g.L_bar = Matrix::Zero(2, 1);
    g.Lcal_bar = Matrix::Zero(2, 2);
    g.H1 = Matrix::Zero(1, 1);
    g.H2 = Matrix::Zero(1, 1);
    g.H3 = Matrix::Zero(1, 2);
    g.K_bar = Matrix::Zero(1, 2);
    ControlLaw law{g.K_bar, EstimateSource::SMO};
    SwitchConfig sw;
    sw.omega_bar = 0.0;
    DisturbanceSpec quiet;
    quiet.channels = {{DisturbanceComponent::constant(0.0)}};

    SimConfig cfg;
    cfg.dt = 1e-3;
    cfg.t_end = 10.0;
    cfg.x0 = Vector::Constant(1, 1000.0);
    CHECK_THROWS_WITH_AS(
        integrate_closed_loop(plant, aug, g, law, quiet, sw, cfg),
        doctest::Contains("divergence"), std::runtime_error);
}

TEST_CASE("CSV export: fixed header, full precision round trip") {
    Bundle b = example_bundle();
    SimConfig cfg = short_sim(1e-3, 0.05);
    const auto traj = integrate_closed_loop(b.plant, b.aug, b.gains, b.law,
                                            testing::example_disturbance(),
                                            b.sw, cfg);
    const std::string path = "test_traj_tmp.csv";
    write_trajectory_csv(traj, path);

    std::ifstream in(path);
    REQUIRE(in.good());
    std::string header;
    std::getline(in, header);
    CHECK(header ==
          "t,x1,x2,x3,x4,xhat1,xhat2,xhat3,xhat4,xtilde1,xtilde2,xtilde3,"
          "xtilde4,d1,d2,dhat1,dhat2,dtilde1,dtilde2,dfilt1,dfilt2,u1,u2,y1,y2");

    std::string line;
    std::getline(in, line);  // first data row, t = 0
    std::size_t pos = 0;
    std::vector<double> row;
    while (pos <= line.size()) {
        std::size_t next = line.find(',', pos);
        if (next == std::string::npos) next = line.size();
        row.push_back(std::strtod(line.substr(pos, next - pos).c_str(), nullptr));
        pos = next + 1;
    }
    REQUIRE(row.size() == 25);
    CHECK(row[0] == 0.0);
    for (int i = 0; i < 4; ++i) CHECK(row[1 + i] == traj.x(0, i));  // bit exact
    for (int i = 0; i < 2; ++i) CHECK(row[23 + i] == traj.y(0, i));

    std::size_t rows = 1;
    while (std::getline(in, line)) {
        if (!line.empty()) ++rows;
    }
    CHECK(rows == traj.samples());
    std::remove(path.c_str());
}
