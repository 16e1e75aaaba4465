#include "smoco/config.hpp"
#include "smoco/metrics.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace smoco;

namespace {

PlantModel make_plant(const Matrix& A, const Matrix& B, const Matrix& C,
                      const Matrix& Lambda, const Matrix& C_omega) {
    return PlantModel{A, B, C, Lambda, C_omega};
}

py::dict traj_to_dict(const Trajectory& traj) {
    py::dict out;
    Eigen::Map<const Eigen::VectorXd> t(traj.t.data(),
                                        static_cast<Eigen::Index>(traj.t.size()));
    out["t"] = Eigen::VectorXd(t);
    out["x"] = traj.x;
    out["xhat"] = traj.xhat;
    out["xtilde"] = traj.xtilde;
    out["d"] = traj.d;
    out["dhat"] = traj.dhat;
    out["dtilde"] = traj.dtilde;
    out["dfilt"] = traj.dfilt;
    out["u"] = traj.u;
    out["y"] = traj.y;
    out["omega"] = traj.omega;
    return out;
}

py::dict report_to_dict(const ComparisonReport& rep) {
    py::dict out;
    out["window"] = py::make_tuple(rep.window_lo, rep.window_hi);
    out["err_smo"] = rep.err_smo;
    out["err_smoco"] = rep.err_smoco;
    out["u_smo"] = rep.u_smo;
    out["u_smoco"] = rep.u_smoco;
    out["derr_smo"] = rep.derr_smo;
    out["derr_smoco"] = rep.derr_smoco;
    out["derr_smolf"] = rep.derr_smolf;
    out["err_ordering"] = rep.err_ordering;
    out["u_ordering"] = rep.u_ordering;
    return out;
}

Trajectory simulate_config(const RunConfig& cfg, const std::string& mode) {
    const auto aug = build_augmented(cfg.plant, cfg.phi);
    const auto gains = resolve_gains(cfg, aug);
    ControlLaw law{gains.K_bar, mode == "smo" ? EstimateSource::SMO
                                              : EstimateSource::SMO_CO};
    return integrate_closed_loop(cfg.plant, aug, gains, law, cfg.disturbance,
                                 switch_config(cfg), cfg.sim);
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
    mod.doc() = "Two-layer sliding-mode cascade observer toolkit";

    py::class_<PlantModel>(mod, "PlantModel")
        .def(py::init(&make_plant), py::arg("A"), py::arg("B"), py::arg("C"),
             py::arg("Lambda"), py::arg("C_omega"))
        .def_readonly("A", &PlantModel::A)
        .def_readonly("B", &PlantModel::B)
        .def_readonly("C", &PlantModel::C)
        .def_readonly("Lambda", &PlantModel::Lambda)
        .def_readonly("C_omega", &PlantModel::C_omega)
        .def_property_readonly("Bf", &PlantModel::Bf);

    py::class_<AugmentedModel>(mod, "AugmentedModel")
        .def_readonly("E_bar", &AugmentedModel::E_bar)
        .def_readonly("A_bar", &AugmentedModel::A_bar)
        .def_readonly("B_bar", &AugmentedModel::B_bar)
        .def_readonly("Bf_bar", &AugmentedModel::Bf_bar)
        .def_readonly("C_bar", &AugmentedModel::C_bar)
        .def_readonly("E_inv", &AugmentedModel::E_inv)
        .def_readonly("Phi", &AugmentedModel::Phi);

    py::class_<GainSet>(mod, "GainSet")
        .def_readonly("L_bar", &GainSet::L_bar)
        .def_readonly("Lcal_bar", &GainSet::Lcal_bar)
        .def_readonly("H1", &GainSet::H1)
        .def_readonly("H2", &GainSet::H2)
        .def_readonly("H3", &GainSet::H3)
        .def_readonly("K", &GainSet::K)
        .def_readonly("K_bar", &GainSet::K_bar)
        .def_readonly("B_dagger", &GainSet::B_dagger);

    mod.def("validate_plant",
            [](const PlantModel& plant) {
                const auto rep = validate_plant(plant);
                py::dict out;
                out["controllability_rank"] = rep.controllability_rank;
                out["observability_rank"] = rep.observability_rank;
                out["lambda_condition"] = rep.lambda_condition;
                out["c_omega_psd"] = rep.c_omega_psd;
                out["ok"] = rep.ok;
                out["issues"] = rep.issues;
                return out;
            },
            py::arg("plant"));
    mod.def("build_augmented", &build_augmented, py::arg("plant"), py::arg("phi"));
    mod.def("place_observer_gain", &place_observer_gain, py::arg("aug"), py::arg("poles"));
    mod.def("place_cascade_gain", &place_cascade_gain, py::arg("aug"), py::arg("poles"));
    mod.def("place_state_feedback", &place_state_feedback, py::arg("plant"), py::arg("poles"));
    mod.def("certify_theorem1",
            [](const AugmentedModel& aug, const Matrix& L_bar) {
                const auto r = certify_theorem1(aug, L_bar);
                return py::make_tuple(r.P_bar, r.N1, r.margin);
            },
            py::arg("aug"), py::arg("L_bar"));
    mod.def("certify_closed_loop",
            [](const AugmentedModel& aug, const PlantModel& plant,
               const GainSet& gains, const std::string& mode) {
                const auto cert = certify_closed_loop(
                    aug, plant, gains,
                    mode == "smo" ? LoopMode::SMO : LoopMode::SMO_CO);
                py::dict out;
                out["P_bar"] = cert.P_bar;
                out["Q"] = cert.Q;
                out["beta"] = cert.beta;
                out["margin_theorem1"] = cert.margin_theorem1;
                out["margin_theorem3"] = cert.margin_theorem3;
                out["beta_theorem3"] = cert.beta_theorem3;
                out["margin_closed_loop"] = cert.margin_closed_loop;
                out["pass"] = cert.pass;
                return out;
            },
            py::arg("aug"), py::arg("plant"), py::arg("gains"), py::arg("mode"));
    mod.def("solve_lyapunov", &solve_lyapunov, py::arg("F"), py::arg("W"));
    mod.def("sym_eig_max", &sym_eig_max, py::arg("M"));

    mod.def("load_config", &load_config, py::arg("path"));
    py::class_<SimConfig>(mod, "SimConfig")
        .def_readwrite("dt", &SimConfig::dt)
        .def_readwrite("t_end", &SimConfig::t_end)
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("noise_hold", &SimConfig::noise_hold)
        .def_readwrite("x0", &SimConfig::x0)
        .def_readwrite("window_lo", &SimConfig::window_lo)
        .def_readwrite("window_hi", &SimConfig::window_hi)
        .def_readwrite("record_stride", &SimConfig::record_stride)
        .def_readwrite("lowpass_tau", &SimConfig::lowpass_tau);
    py::class_<RunConfig>(mod, "RunConfig")
        .def_readonly("plant", &RunConfig::plant)
        .def_readonly("phi", &RunConfig::phi)
        .def_readwrite("sim", &RunConfig::sim)
        .def_readwrite("varsigma", &RunConfig::varsigma)
        .def_readwrite("out_dir", &RunConfig::out_dir);
    mod.def("config_hash", &config_hash, py::arg("config"));
    mod.def("resolve_gains",
            [](const RunConfig& cfg) {
                const auto aug = build_augmented(cfg.plant, cfg.phi);
                return resolve_gains(cfg, aug);
            },
            py::arg("config"));
    mod.def("simulate",
            [](const RunConfig& cfg, const std::string& mode) {
                return traj_to_dict(simulate_config(cfg, mode));
            },
            py::arg("config"), py::arg("mode"),
            "Run one closed-loop simulation; mode is 'smo' or 'smoco'.");
    mod.def("compare",
            [](const RunConfig& cfg) {
                const auto smo = simulate_config(cfg, "smo");
                const auto smoco = simulate_config(cfg, "smoco");
                return report_to_dict(build_report(smo, smoco, cfg.sim.window_lo,
                                                   cfg.sim.window_hi));
            },
            py::arg("config"),
            "Run both modes and return the comparison metrics.");
}
