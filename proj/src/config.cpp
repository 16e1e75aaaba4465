#include "smoco/config.hpp"

#include <json.hpp>

#include <fstream>
#include <stdexcept>

namespace smoco {

namespace {

using Json = nlohmann::ordered_json;

Json matrix_to_json(const Matrix& M) {
    Json rows = Json::array();
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        Json row = Json::array();
        for (Eigen::Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const Json& j, const std::string& where) {
    if (!j.is_array() || j.empty() || !j.front().is_array()) {
        throw std::invalid_argument("config: " + where + " must be a nested array of numbers");
    }
    const std::size_t rows = j.size();
    const std::size_t cols = j.front().size();
    Matrix M(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (j[i].size() != cols) {
            throw std::invalid_argument("config: " + where + " has ragged rows");
        }
        for (std::size_t k = 0; k < cols; ++k) {
            if (!j[i][k].is_number()) {
                throw std::invalid_argument("config: " + where + " has a non-numeric entry");
            }
            M(i, k) = j[i][k].get<double>();
        }
    }
    return M;
}

Vector vector_from_json(const Json& j, const std::string& where) {
    if (!j.is_array()) {
        throw std::invalid_argument("config: " + where + " must be an array");
    }
    Vector v(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) v(i) = j[i].get<double>();
    return v;
}

Json vector_to_json(const Vector& v) {
    Json out = Json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

std::vector<std::complex<double>> poles_from_json(const Json& j,
                                                  const std::string& where) {
    std::vector<std::complex<double>> poles;
    for (const auto& e : j) {
        if (e.is_number()) {
            poles.emplace_back(e.get<double>(), 0.0);
        } else if (e.is_array() && e.size() == 2) {
            poles.emplace_back(e[0].get<double>(), e[1].get<double>());
        } else {
            throw std::invalid_argument("config: " + where + " poles must be numbers or [re, im] pairs");
        }
    }
    return poles;
}

Json poles_to_json(const std::vector<std::complex<double>>& poles) {
    Json out = Json::array();
    for (const auto& pl : poles) {
        if (pl.imag() == 0.0) {
            out.push_back(pl.real());
        } else {
            out.push_back(Json::array({pl.real(), pl.imag()}));
        }
    }
    return out;
}

GainSource gain_source_from_json(const Json& j, const std::string& where,
                                 bool gain_supplied) {
    GainSource src;
    const bool has_poles = j.contains("poles");
    const bool has_region = j.contains("region");
    if (has_poles && has_region) {
        throw std::invalid_argument("config: " + where + " must give exactly one of poles or region");
    }
    if (!has_poles && !has_region && !gain_supplied) {
        throw std::invalid_argument("config: " + where + " needs poles, a region, or a supplied gain");
    }
    if (has_poles) src.poles = poles_from_json(j["poles"], where);
    if (has_region) {
        const auto& r = j["region"];
        src.region = LmiRegion{r.at("half_angle").get<double>(),
                               r.at("radius").get<double>(),
                               r.at("shift").get<double>()};
    }
    return src;
}

Json gain_source_to_json(const GainSource& src) {
    Json j = Json::object();
    if (src.poles) j["poles"] = poles_to_json(*src.poles);
    if (src.region) {
        j["region"] = Json{{"half_angle", src.region->half_angle},
                           {"radius", src.region->radius},
                           {"shift", src.region->shift}};
    }
    return j;
}

DisturbanceSpec disturbance_from_json(const Json& j) {
    DisturbanceSpec spec;
    for (const auto& channel : j.at("channels")) {
        std::vector<DisturbanceComponent> comps;
        for (const auto& c : channel) {
            const std::string kind = c.at("type").get<std::string>();
            if (kind == "sine") {
                comps.push_back(DisturbanceComponent::sine(
                    c.at("amplitude").get<double>(), c.at("omega").get<double>(),
                    c.value("phase", 0.0)));
            } else if (kind == "step") {
                comps.push_back(DisturbanceComponent::step(
                    c.at("level").get<double>(), c.at("onset").get<double>()));
            } else if (kind == "constant") {
                comps.push_back(
                    DisturbanceComponent::constant(c.at("level").get<double>()));
            } else {
                throw std::invalid_argument("config: unknown disturbance component type '" + kind + "'");
            }
        }
        spec.channels.push_back(std::move(comps));
    }
    return spec;
}

Json disturbance_to_json(const DisturbanceSpec& spec) {
    Json channels = Json::array();
    for (const auto& channel : spec.channels) {
        Json comps = Json::array();
        for (const auto& c : channel) {
            switch (c.kind) {
                case DisturbanceComponent::Kind::Sine:
                    comps.push_back(Json{{"type", "sine"},
                                         {"amplitude", c.a},
                                         {"omega", c.b},
                                         {"phase", c.c}});
                    break;
                case DisturbanceComponent::Kind::Step:
                    comps.push_back(
                        Json{{"type", "step"}, {"level", c.a}, {"onset", c.b}});
                    break;
                case DisturbanceComponent::Kind::Constant:
                    comps.push_back(Json{{"type", "constant"}, {"level", c.a}});
                    break;
            }
        }
        channels.push_back(std::move(comps));
    }
    return Json{{"channels", channels}};
}

SimMode mode_from_string(const std::string& s) {
    if (s == "smo") return SimMode::SMO;
    if (s == "smoco") return SimMode::SMO_CO;
    if (s == "both") return SimMode::BOTH;
    throw std::invalid_argument("config: mode must be smo, smoco, or both");
}

std::string mode_to_string(SimMode mode) {
    switch (mode) {
        case SimMode::SMO: return "smo";
        case SimMode::SMO_CO: return "smoco";
        default: return "both";
    }
}

}  // namespace

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("config: cannot open " + path);
    }
    Json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw std::invalid_argument(std::string("config: parse error: ") + e.what());
    }

    RunConfig cfg;
    const auto& plant = j.at("plant");
    cfg.plant.A = matrix_from_json(plant.at("A"), "plant.A");
    cfg.plant.B = matrix_from_json(plant.at("B"), "plant.B");
    cfg.plant.C = matrix_from_json(plant.at("C"), "plant.C");
    cfg.plant.Lambda = matrix_from_json(plant.at("Lambda"), "plant.Lambda");
    cfg.plant.C_omega = matrix_from_json(plant.at("C_omega"), "plant.C_omega");
    cfg.phi = matrix_from_json(j.at("phi"), "phi");

    const auto& b = j.at("bounds");
    cfg.bounds.omega_bar = b.value("omega_bar", 1.0);
    if (b.contains("switch_gain")) {
        cfg.bounds.switch_gain = b["switch_gain"].get<double>();
        cfg.bounds.d_bar = b.value("d_bar", 0.0);
        cfg.bounds.h_bar = b.value("h_bar", 0.0);
        cfg.bounds.eta = b.value("eta", 1.0);
    } else {
        cfg.bounds = DisturbanceBounds::from_parts(
            b.at("d_bar").get<double>(), b.at("h_bar").get<double>(),
            b.at("eta").get<double>(), cfg.bounds.omega_bar, cfg.phi);
    }

    if (j.contains("gains")) {
        const auto& g = j["gains"];
        auto maybe = [&](const char* name) -> std::optional<Matrix> {
            if (!g.contains(name)) return std::nullopt;
            return matrix_from_json(g[name], std::string("gains.") + name);
        };
        cfg.supplied.L_bar = maybe("L_bar");
        cfg.supplied.Lcal_bar = maybe("Lcal_bar");
        cfg.supplied.K = maybe("K");
        cfg.supplied.H1 = maybe("H1");
        cfg.supplied.H2 = maybe("H2");
        cfg.supplied.H3 = maybe("H3");
    }

    cfg.observer = gain_source_from_json(j.value("observer", Json::object()),
                                         "observer", cfg.supplied.L_bar.has_value());
    cfg.cascade = gain_source_from_json(j.value("cascade", Json::object()),
                                        "cascade", cfg.supplied.Lcal_bar.has_value());
    cfg.controller = gain_source_from_json(j.value("controller", Json::object()),
                                           "controller", cfg.supplied.K.has_value());

    cfg.disturbance = disturbance_from_json(j.at("disturbance"));

    const auto& s = j.at("sim");
    cfg.sim.dt = s.value("dt", 1e-4);
    cfg.sim.t_end = s.value("t_end", 30.0);
    cfg.sim.seed = s.value("seed", std::uint64_t{0});
    cfg.sim.noise_hold = s.value("noise_hold", 1);
    cfg.sim.x0 = vector_from_json(s.at("x0"), "sim.x0");
    if (s.contains("observer_init")) {
        cfg.sim.observer_init = vector_from_json(s["observer_init"], "sim.observer_init");
    }
    cfg.sim.mode = mode_from_string(s.value("mode", std::string("both")));
    if (s.contains("window")) {
        cfg.sim.window_lo = s["window"][0].get<double>();
        cfg.sim.window_hi = s["window"][1].get<double>();
    }
    cfg.sim.record_stride = s.value("record_stride", 1);
    cfg.sim.lowpass_tau = s.value("lowpass_tau", 0.01);

    cfg.varsigma = j.value("varsigma", 0.01);
    cfg.out_dir = j.value("out_dir", std::string("out"));

    if (cfg.sim.dt <= 0.0 || cfg.sim.t_end <= 0.0) {
        throw std::invalid_argument("config: dt and t_end must be positive");
    }
    if (cfg.sim.window_lo < 0.0 || cfg.sim.window_hi <= cfg.sim.window_lo) {
        throw std::invalid_argument("config: metrics window must satisfy 0 <= lo < hi");
    }
    return cfg;
}

std::string serialize_config(const RunConfig& cfg) {
    Json j;
    j["plant"] = Json{{"A", matrix_to_json(cfg.plant.A)},
                      {"B", matrix_to_json(cfg.plant.B)},
                      {"C", matrix_to_json(cfg.plant.C)},
                      {"Lambda", matrix_to_json(cfg.plant.Lambda)},
                      {"C_omega", matrix_to_json(cfg.plant.C_omega)}};
    j["phi"] = matrix_to_json(cfg.phi);
    j["bounds"] = Json{{"switch_gain", cfg.bounds.switch_gain},
                       {"omega_bar", cfg.bounds.omega_bar},
                       {"d_bar", cfg.bounds.d_bar},
                       {"h_bar", cfg.bounds.h_bar},
                       {"eta", cfg.bounds.eta}};
    j["observer"] = gain_source_to_json(cfg.observer);
    j["cascade"] = gain_source_to_json(cfg.cascade);
    j["controller"] = gain_source_to_json(cfg.controller);
    Json gains = Json::object();
    if (cfg.supplied.L_bar) gains["L_bar"] = matrix_to_json(*cfg.supplied.L_bar);
    if (cfg.supplied.Lcal_bar) gains["Lcal_bar"] = matrix_to_json(*cfg.supplied.Lcal_bar);
    if (cfg.supplied.K) gains["K"] = matrix_to_json(*cfg.supplied.K);
    if (cfg.supplied.H1) gains["H1"] = matrix_to_json(*cfg.supplied.H1);
    if (cfg.supplied.H2) gains["H2"] = matrix_to_json(*cfg.supplied.H2);
    if (cfg.supplied.H3) gains["H3"] = matrix_to_json(*cfg.supplied.H3);
    if (!gains.empty()) j["gains"] = gains;
    j["disturbance"] = disturbance_to_json(cfg.disturbance);
    Json sim = Json{{"dt", cfg.sim.dt},
                    {"t_end", cfg.sim.t_end},
                    {"seed", cfg.sim.seed},
                    {"noise_hold", cfg.sim.noise_hold},
                    {"x0", vector_to_json(cfg.sim.x0)},
                    {"mode", mode_to_string(cfg.sim.mode)},
                    {"window", Json::array({cfg.sim.window_lo, cfg.sim.window_hi})},
                    {"record_stride", cfg.sim.record_stride},
                    {"lowpass_tau", cfg.sim.lowpass_tau}};
    if (cfg.sim.observer_init.size() > 0) {
        sim["observer_init"] = vector_to_json(cfg.sim.observer_init);
    }
    j["sim"] = sim;
    j["varsigma"] = cfg.varsigma;
    j["out_dir"] = cfg.out_dir;
    return j.dump(2);
}

void save_config(const RunConfig& cfg, const std::string& path) {
    std::ofstream out(path);
    if (!out) {
        throw std::runtime_error("config: cannot write " + path);
    }
    out << serialize_config(cfg) << "\n";
}

std::string config_hash(const RunConfig& cfg) {
    const std::string s = serialize_config(cfg);
    std::uint64_t h = 1469598103934665603ull;  // FNV-1a
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string(buf);
}

GainSet resolve_gains(const RunConfig& cfg, const AugmentedModel& aug) {
    GainSet gains;
    auto source_poles = [&](const GainSource& src, int count,
                            const char* where) {
        if (src.poles) return *src.poles;
        if (src.region) return default_region_poles(*src.region, count);
        throw std::invalid_argument(std::string("resolve_gains: no pole source for ") + where);
    };

    if (cfg.supplied.L_bar) {
        gains.L_bar = *cfg.supplied.L_bar;
    } else {
        gains.L_bar = place_observer_gain(
            aug, source_poles(cfg.observer, aug.n + aug.m, "observer"));
    }
    if (cfg.supplied.Lcal_bar) {
        gains.Lcal_bar = *cfg.supplied.Lcal_bar;
    } else {
        gains.Lcal_bar = place_cascade_gain(
            aug, source_poles(cfg.cascade, aug.n + aug.m, "cascade"));
    }
    if (cfg.supplied.K) {
        gains.K = *cfg.supplied.K;
    } else {
        gains.K = place_state_feedback(
            cfg.plant, source_poles(cfg.controller, cfg.plant.n(), "controller"));
    }
    const auto comp = compensator_gain(cfg.plant, gains.K);
    gains.B_dagger = comp.B_dagger;
    gains.K_bar = comp.K_bar;

    const bool need_switch =
        !cfg.supplied.H1 || !cfg.supplied.H2 || !cfg.supplied.H3;
    if (need_switch) {
        const auto th1 = certify_theorem1(aug, gains.L_bar);
        const auto sg =
            solve_switch_gains(aug, cfg.plant.C_omega, gains.L_bar, th1.P_bar);
        gains.H1 = sg.H1;
        gains.H2 = sg.H2;
        gains.H3 = sg.H3;
        gains.mu1 = sg.mu1;
        gains.mu2 = sg.mu2;
        gains.mu3 = sg.mu3;
    }
    if (cfg.supplied.H1) gains.H1 = *cfg.supplied.H1;
    if (cfg.supplied.H2) gains.H2 = *cfg.supplied.H2;
    if (cfg.supplied.H3) gains.H3 = *cfg.supplied.H3;
    return gains;
}

SwitchConfig switch_config(const RunConfig& cfg) {
    SwitchConfig sw;
    sw.varsigma = cfg.varsigma;
    sw.switch_gain = cfg.bounds.switch_gain;
    sw.omega_bar = cfg.bounds.omega_bar;
    return sw;
}

}  // namespace smoco
