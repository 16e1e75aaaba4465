#pragma once

#include "smoco/sim.hpp"

#include <string>

namespace smoco {

// Continuous-time l2 norm of a sampled vector series over [t_lo, t_hi]:
// sqrt(sum ||v(t_k)||^2 * dt), rectangle rule on the recorded grid.
double signal_l2(const Matrix& series, const std::vector<double>& t,
                 double t_lo, double t_hi);

struct ComparisonReport {
    double window_lo = 0.0;
    double window_hi = 0.0;
    double err_smo = 0.0;    // ||x - xhat||
    double err_smoco = 0.0;  // ||x - xtilde||
    double u_smo = 0.0;
    double u_smoco = 0.0;
    double derr_smo = 0.0;    // ||d - dhat||
    double derr_smoco = 0.0;  // ||d - dtilde||
    double derr_smolf = 0.0;  // ||d - d_filt||
    bool err_ordering = false;  // err_smoco < err_smo
    bool u_ordering = false;    // u_smoco < u_smo
    bool tie = false;
};

ComparisonReport build_report(const Trajectory& traj_smo,
                              const Trajectory& traj_smoco, double window_lo,
                              double window_hi);

// Human-readable table plus key-value lines.
std::string format_report(const ComparisonReport& report);

}  // namespace smoco
