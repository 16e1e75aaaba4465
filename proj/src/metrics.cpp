#include "smoco/metrics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace smoco {

double signal_l2(const Matrix& series, const std::vector<double>& t,
                 double t_lo, double t_hi) {
    if (series.rows() != static_cast<Eigen::Index>(t.size())) {
        throw std::invalid_argument("signal_l2: series/grid length mismatch");
    }
    if (t.empty() || t_lo > t_hi || t_lo < t.front() - 1e-12 ||
        t_hi > t.back() + 1e-12) {
        throw std::invalid_argument("signal_l2: window outside the trajectory span");
    }
    const double dt = t.size() > 1 ? t[1] - t[0] : 0.0;
    double acc = 0.0;
    bool any = false;
    for (std::size_t k = 0; k < t.size(); ++k) {
        if (t[k] < t_lo - 1e-12 || t[k] > t_hi + 1e-12) continue;
        acc += series.row(static_cast<Eigen::Index>(k)).squaredNorm() * dt;
        any = true;
    }
    if (!any) {
        throw std::invalid_argument("signal_l2: empty window");
    }
    return std::sqrt(acc);
}

ComparisonReport build_report(const Trajectory& traj_smo,
                              const Trajectory& traj_smoco, double window_lo,
                              double window_hi) {
    if (traj_smo.samples() != traj_smoco.samples() ||
        traj_smo.grid_dt() != traj_smoco.grid_dt()) {
        throw std::invalid_argument("build_report: trajectory grids do not match");
    }
    ComparisonReport rep;
    rep.window_lo = window_lo;
    rep.window_hi = window_hi;
    const auto& t = traj_smo.t;
    rep.err_smo = signal_l2(traj_smo.x - traj_smo.xhat, t, window_lo, window_hi);
    rep.err_smoco =
        signal_l2(traj_smoco.x - traj_smoco.xtilde, t, window_lo, window_hi);
    rep.u_smo = signal_l2(traj_smo.u, t, window_lo, window_hi);
    rep.u_smoco = signal_l2(traj_smoco.u, t, window_lo, window_hi);
    rep.derr_smo = signal_l2(traj_smo.d - traj_smo.dhat, t, window_lo, window_hi);
    rep.derr_smoco =
        signal_l2(traj_smoco.d - traj_smoco.dtilde, t, window_lo, window_hi);
    rep.derr_smolf =
        signal_l2(traj_smo.d - traj_smo.dfilt, t, window_lo, window_hi);
    rep.tie = rep.err_smoco == rep.err_smo && rep.u_smoco == rep.u_smo;
    rep.err_ordering = rep.err_smoco < rep.err_smo;
    rep.u_ordering = rep.u_smoco < rep.u_smo;
    return rep;
}

std::string format_report(const ComparisonReport& rep) {
    std::ostringstream os;
    os.precision(17);
    os << "# norm convention: continuous-time l2, rectangle rule with grid dt\n";
    os << "window_lo = " << rep.window_lo << "\n";
    os << "window_hi = " << rep.window_hi << "\n";
    os << "err_smo = " << rep.err_smo << "\n";
    os << "err_smoco = " << rep.err_smoco << "\n";
    os << "u_smo = " << rep.u_smo << "\n";
    os << "u_smoco = " << rep.u_smoco << "\n";
    os << "derr_smo = " << rep.derr_smo << "\n";
    os << "derr_smoco = " << rep.derr_smoco << "\n";
    os << "derr_smolf = " << rep.derr_smolf << "\n";
    os << "err_ordering = " << (rep.err_ordering ? "true" : "false") << "\n";
    os << "u_ordering = " << (rep.u_ordering ? "true" : "false") << "\n";
    os << "tie = " << (rep.tie ? "true" : "false") << "\n";
    os << "\n";
    os.precision(4);
    os << "                    estimation-error   control-energy   disturbance-error\n";
    os << "SMO                 " << rep.err_smo << "             " << rep.u_smo
       << "            " << rep.derr_smo << "\n";
    os << "SMO-CO              " << rep.err_smoco << "             "
       << rep.u_smoco << "            " << rep.derr_smoco << "\n";
    os << "SMO-LF              -                  -                "
       << rep.derr_smolf << "\n";
    return os.str();
}

}  // namespace smoco
