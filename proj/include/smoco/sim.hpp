#pragma once

#include "smoco/control.hpp"
#include "smoco/model.hpp"
#include "smoco/observers.hpp"
#include "smoco/synth.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace smoco {

struct DisturbanceComponent {
    enum class Kind { Sine, Step, Constant } kind;
    // Sine: a = amplitude, b = angular frequency (rad/s), c = phase.
    // Step: a = level, b = onset time (s).
    // Constant: a = level.
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;

    static DisturbanceComponent sine(double amplitude, double omega,
                                     double phase) {
        return {Kind::Sine, amplitude, omega, phase};
    }
    static DisturbanceComponent step(double level, double onset) {
        return {Kind::Step, level, onset, 0.0};
    }
    static DisturbanceComponent constant(double level) {
        return {Kind::Constant, level, 0.0, 0.0};
    }
};

struct DisturbanceSpec {
    // channels[i] sums its components to give d_i(t).
    std::vector<std::vector<DisturbanceComponent>> channels;
};

Vector disturbance_eval(const DisturbanceSpec& spec, double t);
// Analytic term-wise derivative; the step contributes 0 away from its onset.
Vector disturbance_derivative(const DisturbanceSpec& spec, double t);

enum class SimMode { SMO, SMO_CO, BOTH };

struct SimConfig {
    double dt = 1e-4;
    double t_end = 30.0;
    std::uint64_t seed = 0;
    int noise_hold = 1;  // integration steps per noise sample
    Vector x0;
    Vector observer_init;  // (n+m), default zero
    SimMode mode = SimMode::BOTH;
    double window_lo = 1.0;
    double window_hi = 30.0;
    int record_stride = 1;  // store every k-th step
    double lowpass_tau = 0.01;
};

struct Trajectory {
    std::vector<double> t;
    Matrix x;       // N x n
    Matrix xhat;    // N x n
    Matrix xtilde;  // N x n
    Matrix d;       // N x m
    Matrix dhat;    // N x m
    Matrix dtilde;  // N x m
    Matrix dfilt;   // N x m
    Matrix u;       // N x m
    Matrix y;       // N x p
    Matrix omega;   // N x p

    std::size_t samples() const { return t.size(); }
    double grid_dt() const { return t.size() > 1 ? t[1] - t[0] : 0.0; }
};

// Draws p independent standard normal variates (fixed Box-Muller recipe so
// streams are stable across standard library versions) and clips each to
// [-omega_bar, omega_bar].
Vector noise_sample(std::mt19937_64& rng, const Matrix& C_omega,
                    double omega_bar);

// Classical 4th-order fixed-step integration of plant + both observer
// layers + low-pass filter. Noise and u are held constant within a step;
// u is computed from the estimate at the step start. The mode selects
// which estimate feeds the controller.
Trajectory integrate_closed_loop(const PlantModel& plant,
                                 const AugmentedModel& aug,
                                 const GainSet& gains, const ControlLaw& law,
                                 const DisturbanceSpec& spec,
                                 const SwitchConfig& sw, const SimConfig& cfg);

// CSV export, 17 significant digits, fixed column layout.
void write_trajectory_csv(const Trajectory& traj, const std::string& path,
                          int decimation = 1);

}  // namespace smoco
