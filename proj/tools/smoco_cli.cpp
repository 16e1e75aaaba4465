#include "smoco/config.hpp"
#include "smoco/metrics.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

namespace {

using smoco::Matrix;
using Json = nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitAssertion = 1;
constexpr int kExitInput = 2;

struct Overrides {
    std::string config_path;
    std::optional<std::string> mode;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<double> dt;
    std::optional<double> t_end;
};

void add_common_flags(CLI::App* cmd, Overrides& ov) {
    cmd->add_option("--config", ov.config_path, "Path to the run config file")
        ->required();
    cmd->add_option("--mode", ov.mode, "Override run mode: smo|smoco|both")
        ->check(CLI::IsMember({"smo", "smoco", "both"}));
    cmd->add_option("--seed", ov.seed, "Override the noise seed");
    cmd->add_option("--out", ov.out, "Override the output directory");
    cmd->add_option("--dt", ov.dt, "Override the integration step (s)");
    cmd->add_option("--t-end", ov.t_end, "Override the end time (s)");
}

smoco::RunConfig load_with_overrides(const Overrides& ov) {
    smoco::RunConfig cfg = smoco::load_config(ov.config_path);
    if (ov.mode) {
        if (*ov.mode == "smo") cfg.sim.mode = smoco::SimMode::SMO;
        else if (*ov.mode == "smoco") cfg.sim.mode = smoco::SimMode::SMO_CO;
        else cfg.sim.mode = smoco::SimMode::BOTH;
    }
    if (ov.seed) cfg.sim.seed = *ov.seed;
    if (ov.out) cfg.out_dir = *ov.out;
    if (ov.dt) cfg.sim.dt = *ov.dt;
    if (ov.t_end) cfg.sim.t_end = *ov.t_end;
    return cfg;
}

std::filesystem::path prepare_out_dir(const smoco::RunConfig& cfg) {
    std::filesystem::path dir(cfg.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

Json matrix_to_json(const Matrix& M) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

void write_text(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << body;
}

std::string poles_to_string(const std::vector<std::complex<double>>& poles) {
    std::ostringstream os;
    os.precision(17);
    for (std::size_t i = 0; i < poles.size(); ++i) {
        if (i) os << "; ";
        os << poles[i].real();
        if (poles[i].imag() != 0.0) {
            os << (poles[i].imag() > 0 ? "+" : "") << poles[i].imag() << "i";
        }
    }
    return os.str();
}

bool poles_in_region(const std::vector<std::complex<double>>& poles,
                     const smoco::LmiRegion& region) {
    for (const auto& pl : poles) {
        if (!smoco::region_contains(region, pl)) return false;
    }
    return true;
}

std::string certificate_text(const smoco::RunConfig& cfg,
                             const smoco::Certificate& cert,
                             smoco::LoopMode mode) {
    std::ostringstream os;
    os.precision(17);
    os << "config_hash = " << smoco::config_hash(cfg) << "\n";
    os << "seed = " << cfg.sim.seed << "\n";
    os << "mode = " << (mode == smoco::LoopMode::SMO ? "smo" : "smoco") << "\n";
    os << "margin_theorem1 = " << cert.margin_theorem1 << "\n";
    if (mode == smoco::LoopMode::SMO_CO) {
        os << "beta_theorem3 = " << cert.beta_theorem3 << "\n";
        os << "margin_theorem3 = " << cert.margin_theorem3 << "\n";
    }
    os << "beta = " << cert.beta << "\n";
    os << "margin_closed_loop = " << cert.margin_closed_loop << "\n";
    os << "observer_poles = " << poles_to_string(cert.pole_report.observer_poles) << "\n";
    if (mode == smoco::LoopMode::SMO_CO) {
        os << "cascade_poles = " << poles_to_string(cert.pole_report.cascade_poles) << "\n";
    }
    os << "controller_poles = " << poles_to_string(cert.pole_report.controller_poles) << "\n";
    if (cfg.observer.region) {
        os << "observer_poles_in_region = "
           << (poles_in_region(cert.pole_report.observer_poles, *cfg.observer.region) ? "true" : "false")
           << "\n";
    }
    if (mode == smoco::LoopMode::SMO_CO && cfg.cascade.region) {
        os << "cascade_poles_in_region = "
           << (poles_in_region(cert.pole_report.cascade_poles, *cfg.cascade.region) ? "true" : "false")
           << "\n";
    }
    os << "pass = " << (cert.pass ? "true" : "false") << "\n";
    return os.str();
}

int cmd_augment(const Overrides& ov) {
    const auto cfg = load_with_overrides(ov);
    const auto report = smoco::validate_plant(cfg.plant);
    if (!report.ok) {
        for (const auto& issue : report.issues) {
            std::cerr << "validation: " << issue << "\n";
        }
        return kExitInput;
    }
    const auto aug = smoco::build_augmented(cfg.plant, cfg.phi);
    const auto dir = prepare_out_dir(cfg);
    Json j;
    j["config_hash"] = smoco::config_hash(cfg);
    j["seed"] = cfg.sim.seed;
    j["validation"] = Json{{"controllability_rank", report.controllability_rank},
                           {"observability_rank", report.observability_rank},
                           {"lambda_condition", report.lambda_condition},
                           {"c_omega_psd", report.c_omega_psd}};
    j["E_bar"] = matrix_to_json(aug.E_bar);
    j["A_bar"] = matrix_to_json(aug.A_bar);
    j["B_bar"] = matrix_to_json(aug.B_bar);
    j["Bf_bar"] = matrix_to_json(aug.Bf_bar);
    j["C_bar"] = matrix_to_json(aug.C_bar);
    j["Phi"] = matrix_to_json(aug.Phi);
    write_text(dir / "augmented.json", j.dump(2) + "\n");
    std::cout << "wrote " << (dir / "augmented.json").string() << "\n";
    return kExitOk;
}

int write_certificates(const smoco::RunConfig& cfg,
                       const smoco::AugmentedModel& aug,
                       const smoco::GainSet& gains,
                       const std::filesystem::path& dir) {
    bool all_pass = true;
    const auto want_smo = cfg.sim.mode != smoco::SimMode::SMO_CO;
    const auto want_smoco = cfg.sim.mode != smoco::SimMode::SMO;
    if (want_smo) {
        const auto cert = smoco::certify_closed_loop(aug, cfg.plant, gains,
                                                     smoco::LoopMode::SMO);
        write_text(dir / "certificate_smo.txt",
                   certificate_text(cfg, cert, smoco::LoopMode::SMO));
        all_pass = all_pass && cert.pass;
    }
    if (want_smoco) {
        const auto cert = smoco::certify_closed_loop(aug, cfg.plant, gains,
                                                     smoco::LoopMode::SMO_CO);
        write_text(dir / "certificate_smoco.txt",
                   certificate_text(cfg, cert, smoco::LoopMode::SMO_CO));
        all_pass = all_pass && cert.pass;
    }
    return all_pass ? kExitOk : kExitAssertion;
}

int cmd_synthesize(const Overrides& ov, bool supplied_only) {
    const auto cfg = load_with_overrides(ov);
    if (supplied_only &&
        !(cfg.supplied.L_bar && cfg.supplied.Lcal_bar && cfg.supplied.K)) {
        std::cerr << "certify: config must supply L_bar, Lcal_bar, and K\n";
        return kExitInput;
    }
    const auto aug = smoco::build_augmented(cfg.plant, cfg.phi);
    const auto gains = smoco::resolve_gains(cfg, aug);
    const auto dir = prepare_out_dir(cfg);

    Json j;
    j["config_hash"] = smoco::config_hash(cfg);
    j["seed"] = cfg.sim.seed;
    j["L_bar"] = matrix_to_json(gains.L_bar);
    j["Lcal_bar"] = matrix_to_json(gains.Lcal_bar);
    j["K"] = matrix_to_json(gains.K);
    j["K_bar"] = matrix_to_json(gains.K_bar);
    j["B_dagger"] = matrix_to_json(gains.B_dagger);
    j["H1"] = matrix_to_json(gains.H1);
    j["H2"] = matrix_to_json(gains.H2);
    j["H3"] = matrix_to_json(gains.H3);
    j["residuals"] = Json{{"mu1", gains.mu1}, {"mu2", gains.mu2}, {"mu3", gains.mu3}};
    write_text(dir / "gains.json", j.dump(2) + "\n");

    const int rc = write_certificates(cfg, aug, gains, dir);
    std::cout << "wrote " << (dir / "gains.json").string()
              << " and certificates\n";
    return rc;
}

void write_meta(const smoco::RunConfig& cfg, const std::filesystem::path& dir) {
    std::ostringstream os;
    os << "config_hash = " << smoco::config_hash(cfg) << "\n";
    os << "seed = " << cfg.sim.seed << "\n";
    write_text(dir / "run.meta.txt", os.str());
}

smoco::Trajectory run_one(const smoco::RunConfig& cfg,
                          const smoco::AugmentedModel& aug,
                          const smoco::GainSet& gains,
                          smoco::EstimateSource source) {
    smoco::ControlLaw law{gains.K_bar, source};
    return smoco::integrate_closed_loop(cfg.plant, aug, gains, law,
                                        cfg.disturbance, smoco::switch_config(cfg),
                                        cfg.sim);
}

int cmd_simulate(const Overrides& ov) {
    const auto cfg = load_with_overrides(ov);
    const auto aug = smoco::build_augmented(cfg.plant, cfg.phi);
    const auto gains = smoco::resolve_gains(cfg, aug);
    const auto dir = prepare_out_dir(cfg);
    write_meta(cfg, dir);
    if (cfg.sim.mode != smoco::SimMode::SMO_CO) {
        const auto traj = run_one(cfg, aug, gains, smoco::EstimateSource::SMO);
        smoco::write_trajectory_csv(traj, (dir / "traj_smo.csv").string());
        std::cout << "wrote " << (dir / "traj_smo.csv").string() << "\n";
    }
    if (cfg.sim.mode != smoco::SimMode::SMO) {
        const auto traj = run_one(cfg, aug, gains, smoco::EstimateSource::SMO_CO);
        smoco::write_trajectory_csv(traj, (dir / "traj_smoco.csv").string());
        std::cout << "wrote " << (dir / "traj_smoco.csv").string() << "\n";
    }
    return kExitOk;
}

int cmd_compare(const Overrides& ov) {
    auto cfg = load_with_overrides(ov);
    const auto aug = smoco::build_augmented(cfg.plant, cfg.phi);
    const auto gains = smoco::resolve_gains(cfg, aug);
    const auto dir = prepare_out_dir(cfg);
    const auto traj_smo = run_one(cfg, aug, gains, smoco::EstimateSource::SMO);
    const auto traj_smoco =
        run_one(cfg, aug, gains, smoco::EstimateSource::SMO_CO);
    const auto rep = smoco::build_report(traj_smo, traj_smoco,
                                         cfg.sim.window_lo, cfg.sim.window_hi);
    std::ostringstream os;
    os << "config_hash = " << smoco::config_hash(cfg) << "\n";
    os << "seed = " << cfg.sim.seed << "\n";
    os << smoco::format_report(rep);
    write_text(dir / "report.txt", os.str());
    std::cout << os.str();
    return (rep.err_ordering && rep.u_ordering) ? kExitOk : kExitAssertion;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-layer sliding-mode cascade observer toolkit"};
    app.require_subcommand(1);

    Overrides ov_augment, ov_synth, ov_certify, ov_simulate, ov_compare;
    auto* c_augment = app.add_subcommand("augment", "Build and export the descriptor-augmented model");
    add_common_flags(c_augment, ov_augment);
    auto* c_synth = app.add_subcommand("synthesize", "Synthesize gains and write certificates");
    add_common_flags(c_synth, ov_synth);
    auto* c_certify = app.add_subcommand("certify", "Certify externally supplied gains");
    add_common_flags(c_certify, ov_certify);
    auto* c_simulate = app.add_subcommand("simulate", "Run the closed-loop simulation and export CSV");
    add_common_flags(c_simulate, ov_simulate);
    auto* c_compare = app.add_subcommand("compare", "Run both modes and write the comparison report");
    add_common_flags(c_compare, ov_compare);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitInput;
    }

    try {
        if (c_augment->parsed()) return cmd_augment(ov_augment);
        if (c_synth->parsed()) return cmd_synthesize(ov_synth, false);
        if (c_certify->parsed()) return cmd_synthesize(ov_certify, true);
        if (c_simulate->parsed()) return cmd_simulate(ov_simulate);
        if (c_compare->parsed()) return cmd_compare(ov_compare);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitAssertion;
    }
    return kExitInput;
}
