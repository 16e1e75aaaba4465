#pragma once

#include "smoco/metrics.hpp"
#include "smoco/model.hpp"
#include "smoco/sim.hpp"
#include "smoco/synth.hpp"

#include <optional>
#include <string>

namespace smoco {

// One gain source: an explicit pole list, a pole region (poles taken from
// the deterministic default sampling), or nothing (gain must be supplied).
struct GainSource {
    std::optional<std::vector<std::complex<double>>> poles;
    std::optional<LmiRegion> region;
};

struct SuppliedGains {
    std::optional<Matrix> L_bar;
    std::optional<Matrix> Lcal_bar;
    std::optional<Matrix> K;
    std::optional<Matrix> H1;
    std::optional<Matrix> H2;
    std::optional<Matrix> H3;
};

struct RunConfig {
    PlantModel plant;
    Matrix phi;
    DisturbanceBounds bounds;
    GainSource observer;
    GainSource cascade;
    GainSource controller;
    SuppliedGains supplied;
    DisturbanceSpec disturbance;
    SimConfig sim;
    double varsigma = 0.01;
    std::string out_dir = "out";
};

RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& cfg);
void save_config(const RunConfig& cfg, const std::string& path);

// FNV-1a over the canonical serialization; embedded in outputs.
std::string config_hash(const RunConfig& cfg);

// Resolves the full gain set: supplied gains win, anything missing is
// synthesized from its pole source. Switching gains not supplied are solved
// against the constructed observer certificate.
GainSet resolve_gains(const RunConfig& cfg, const AugmentedModel& aug);

SwitchConfig switch_config(const RunConfig& cfg);

}  // namespace smoco
