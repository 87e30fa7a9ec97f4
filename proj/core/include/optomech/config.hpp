#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "optomech/experiment.hpp"

namespace optomech {

// JSON configuration:
//   { "system": { "omega_m": 3, "gamma": 3e-5, "kc": 9, "delta0": -3,
//                 "power": 12, "n_th": 9.508, "bath": "cb" },
//     "experiment": { "kind": "steady", "out": "run", "workers": 2, ... } }
// Unknown keys anywhere are rejected with Error{ConfigError}.
ExperimentSpec parse_config(std::string_view json_text);
ExperimentSpec load_config(const std::filesystem::path& path);

// Command-line overrides; set fields win over the file.
struct ParamOverrides {
    std::optional<double> omega_m;
    std::optional<double> gamma;
    std::optional<double> kc;
    std::optional<double> delta0;
    std::optional<double> power;
    std::optional<double> n_th;
    std::optional<BathKind> bath;
};
void apply_overrides(ExperimentSpec& spec, const ParamOverrides& overrides);

// Fully resolved configuration in the same schema (used for run manifests).
std::string to_json(const ExperimentSpec& spec);

}  // namespace optomech
