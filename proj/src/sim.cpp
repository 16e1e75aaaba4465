#include "smoco/sim.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace smoco {

Vector disturbance_eval(const DisturbanceSpec& spec, double t) {
    Vector d = Vector::Zero(spec.channels.size());
    for (std::size_t i = 0; i < spec.channels.size(); ++i) {
        for (const auto& c : spec.channels[i]) {
            switch (c.kind) {
                case DisturbanceComponent::Kind::Sine:
                    d(i) += c.a * std::sin(c.b * t + c.c);
                    break;
                case DisturbanceComponent::Kind::Step:
                    if (t >= c.b) d(i) += c.a;
                    break;
                case DisturbanceComponent::Kind::Constant:
                    d(i) += c.a;
                    break;
            }
        }
    }
    return d;
}

Vector disturbance_derivative(const DisturbanceSpec& spec, double t) {
    Vector dd = Vector::Zero(spec.channels.size());
    for (std::size_t i = 0; i < spec.channels.size(); ++i) {
        for (const auto& c : spec.channels[i]) {
            if (c.kind == DisturbanceComponent::Kind::Sine) {
                dd(i) += c.a * c.b * std::cos(c.b * t + c.c);
            }
            // Steps and constants contribute 0 away from the onset.
        }
    }
    return dd;
}

Vector noise_sample(std::mt19937_64& rng, const Matrix& C_omega,
                    double omega_bar) {
    const int p = static_cast<int>(C_omega.rows());
    Vector w(p);
    // Box-Muller on explicit 53-bit uniforms keeps the stream independent of
    // standard-library distribution internals.
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    int i = 0;
    while (i < p) {
        const double u1 =
            (static_cast<double>(rng() >> 11) + 1.0) / 9007199254740993.0;
        const double u2 = static_cast<double>(rng() >> 11) / 9007199254740992.0;
        const double r = std::sqrt(-2.0 * std::log(u1));
        w(i++) = r * std::cos(kTwoPi * u2);
        if (i < p) w(i++) = r * std::sin(kTwoPi * u2);
    }
    for (int k = 0; k < p; ++k) {
        w(k) = std::clamp(w(k), -omega_bar, omega_bar);
    }
    return w;
}

namespace {

struct Workspace {
    Vector z, zs, k1, k2, k3, k4;
    Vector y, ey, eps, us1, us2, us3, d;
};

}  // namespace

Trajectory integrate_closed_loop(const PlantModel& plant,
                                 const AugmentedModel& aug,
                                 const GainSet& gains, const ControlLaw& law,
                                 const DisturbanceSpec& spec,
                                 const SwitchConfig& sw, const SimConfig& cfg) {
    const int n = plant.n();
    const int m = plant.m();
    const int p = plant.p();
    const int nm = n + m;
    const int dim = n + 2 * nm + m;
    if (static_cast<int>(spec.channels.size()) != m) {
        throw std::invalid_argument("integrate_closed_loop: disturbance spec needs one channel per input");
    }

    // Fold E^-1 into the observer matrices once; the step loop then only
    // performs matrix-vector products.
    const Matrix Fo = aug.E_inv * aug.A_bar;
    const Matrix Gb = aug.E_inv * aug.B_bar;
    const Matrix GL = aug.E_inv * gains.L_bar;
    const Matrix GBf = aug.E_inv * aug.Bf_bar;
    const Matrix GLCw = aug.E_inv * (gains.L_bar * plant.C_omega);
    const Matrix GLcal = aug.E_inv * gains.Lcal_bar;
    const Matrix Bf = plant.Bf();

    const long N = std::lround(cfg.t_end / cfg.dt);
    const int stride = std::max(1, cfg.record_stride);
    const long records = N / stride + 1;

    Trajectory traj;
    traj.t.reserve(records);
    traj.x.resize(records, n);
    traj.xhat.resize(records, n);
    traj.xtilde.resize(records, n);
    traj.d.resize(records, m);
    traj.dhat.resize(records, m);
    traj.dtilde.resize(records, m);
    traj.dfilt.resize(records, m);
    traj.u.resize(records, m);
    traj.y.resize(records, p);
    traj.omega.resize(records, p);

    Workspace ws;
    ws.z = Vector::Zero(dim);
    if (cfg.x0.size() != n) {
        throw std::invalid_argument("integrate_closed_loop: x0 must have length n");
    }
    ws.z.head(n) = cfg.x0;
    if (cfg.observer_init.size() == nm) {
        ws.z.segment(n, nm) = cfg.observer_init;
        ws.z.segment(n + nm, nm) = cfg.observer_init;
    } else if (cfg.observer_init.size() != 0) {
        throw std::invalid_argument("integrate_closed_loop: observer_init must have length n+m");
    }

    std::mt19937_64 rng(cfg.seed);
    const int hold = std::max(1, cfg.noise_hold);
    Vector w = Vector::Zero(p);
    Vector u = Vector::Zero(m);
    const double dt = cfg.dt;
    const double tau = cfg.lowpass_tau;

    auto rhs = [&](const Vector& z, double ts, Vector& out) {
        const auto x = z.head(n);
        const auto xh = z.segment(n, nm);
        const auto xt = z.segment(n + nm, nm);
        const auto df = z.tail(m);
        ws.y.noalias() = plant.C * x;
        ws.y.noalias() += plant.C_omega * w;
        ws.ey = ws.y;
        ws.ey.noalias() -= aug.C_bar * xh;
        ws.us1 = u_s1(gains.H1 * ws.ey, sw);
        ws.us2 = u_s2(gains.H2 * ws.ey, sw);
        ws.eps = xh - xt;
        ws.us3 = u_s3(gains.H3 * ws.eps, sw);
        ws.d = disturbance_eval(spec, ts);

        out.head(n).noalias() = plant.A * x;
        out.head(n).noalias() += plant.B * u;
        out.head(n).noalias() += Bf * ws.d;

        auto dxh = out.segment(n, nm);
        dxh.noalias() = Fo * xh;
        dxh.noalias() += Gb * u;
        dxh.noalias() += GL * ws.ey;
        dxh.noalias() += GBf * ws.us1;
        dxh.noalias() -= GLCw * ws.us2;

        auto dxt = out.segment(n + nm, nm);
        dxt.noalias() = Fo * xt;
        dxt.noalias() += Gb * u;
        dxt.noalias() += GLcal * ws.eps;
        dxt.noalias() += GBf * ws.us1;
        dxt.noalias() -= GLCw * ws.us2;
        dxt.noalias() += GLCw * ws.us3;

        out.tail(m) = (xh.tail(m) - df) / tau;
    };

    ws.k1.resize(dim);
    ws.k2.resize(dim);
    ws.k3.resize(dim);
    ws.k4.resize(dim);
    ws.zs.resize(dim);

    long rec = 0;
    for (long k = 0; k <= N; ++k) {
        const double t = k * dt;
        if (k % hold == 0) {
            w = noise_sample(rng, plant.C_omega, sw.omega_bar);
        }
        // Control from the step-start estimate, held over the step.
        switch (law.source) {
            case EstimateSource::SMO:
                u.noalias() = law.K_bar * ws.z.segment(n, nm);
                break;
            case EstimateSource::SMO_CO:
                u.noalias() = law.K_bar * ws.z.segment(n + nm, nm);
                break;
            case EstimateSource::TRUE_STATE: {
                Vector true_aug(nm);
                true_aug.head(n) = ws.z.head(n);
                true_aug.tail(m) = disturbance_eval(spec, t);
                u.noalias() = law.K_bar * true_aug;
                break;
            }
        }

        if (k % stride == 0) {
            traj.t.push_back(t);
            traj.x.row(rec) = ws.z.head(n);
            traj.xhat.row(rec) = ws.z.segment(n, n);
            traj.xtilde.row(rec) = ws.z.segment(n + nm, n);
            traj.d.row(rec) = disturbance_eval(spec, t);
            traj.dhat.row(rec) = ws.z.segment(n + n, m);
            traj.dtilde.row(rec) = ws.z.segment(n + nm + n, m);
            traj.dfilt.row(rec) = ws.z.tail(m);
            traj.u.row(rec) = u;
            traj.y.row(rec) = plant.C * ws.z.head(n) + plant.C_omega * w;
            traj.omega.row(rec) = w;
            ++rec;
        }
        if (k == N) break;

        rhs(ws.z, t, ws.k1);
        ws.zs = ws.z + (0.5 * dt) * ws.k1;
        rhs(ws.zs, t + 0.5 * dt, ws.k2);
        ws.zs = ws.z + (0.5 * dt) * ws.k2;
        rhs(ws.zs, t + 0.5 * dt, ws.k3);
        ws.zs = ws.z + dt * ws.k3;
        rhs(ws.zs, t + dt, ws.k4);
        ws.z += (dt / 6.0) * (ws.k1 + 2.0 * ws.k2 + 2.0 * ws.k3 + ws.k4);

        if (!ws.z.allFinite() || ws.z.cwiseAbs().maxCoeff() > 1e12) {
            std::ostringstream os;
            os << "integrate_closed_loop: divergence at step " << k + 1
               << " (t = " << (k + 1) * dt << ")";
            throw std::runtime_error(os.str());
        }
    }
    traj.x.conservativeResize(rec, n);
    traj.xhat.conservativeResize(rec, n);
    traj.xtilde.conservativeResize(rec, n);
    traj.d.conservativeResize(rec, m);
    traj.dhat.conservativeResize(rec, m);
    traj.dtilde.conservativeResize(rec, m);
    traj.dfilt.conservativeResize(rec, m);
    traj.u.conservativeResize(rec, m);
    traj.y.conservativeResize(rec, p);
    traj.omega.conservativeResize(rec, p);
    return traj;
}

void write_trajectory_csv(const Trajectory& traj, const std::string& path,
                          int decimation) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("write_trajectory_csv: cannot open " + path);
    }
    const int n = static_cast<int>(traj.x.cols());
    const int m = static_cast<int>(traj.d.cols());
    const int p = static_cast<int>(traj.y.cols());

    std::ostringstream header;
    header << "t";
    auto cols = [&](const char* base, int count) {
        for (int i = 1; i <= count; ++i) header << "," << base << i;
    };
    cols("x", n);
    cols("xhat", n);
    cols("xtilde", n);
    cols("d", m);
    cols("dhat", m);
    cols("dtilde", m);
    cols("dfilt", m);
    cols("u", m);
    cols("y", p);
    out << header.str() << "\n";

    const int dec = std::max(1, decimation);
    char buf[32];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, ",%.17g", v);
        out << buf;
    };
    for (std::size_t k = 0; k < traj.samples(); k += dec) {
        std::snprintf(buf, sizeof buf, "%.17g", traj.t[k]);
        out << buf;
        const auto row = static_cast<Eigen::Index>(k);
        for (int i = 0; i < n; ++i) put(traj.x(row, i));
        for (int i = 0; i < n; ++i) put(traj.xhat(row, i));
        for (int i = 0; i < n; ++i) put(traj.xtilde(row, i));
        for (int i = 0; i < m; ++i) put(traj.d(row, i));
        for (int i = 0; i < m; ++i) put(traj.dhat(row, i));
        for (int i = 0; i < m; ++i) put(traj.dtilde(row, i));
        for (int i = 0; i < m; ++i) put(traj.dfilt(row, i));
        for (int i = 0; i < m; ++i) put(traj.u(row, i));
        for (int i = 0; i < p; ++i) put(traj.y(row, i));
        out << "\n";
    }
}

}  // namespace smoco
