#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "metasir/network_model.hpp"

namespace metasir {

/// Network config plus the optional simulation window carried by a scenario file.
struct Scenario {
    NetworkConfig network;
    std::optional<double> window_half_width_km;
};

/// Parses the scenario schema:
///
///     {
///       "tier1": {"power_w": 50, "bias": 1, "alpha": 4, "density_per_km2": 2},
///       "tier2": {"power_w": 5,  "bias": 1, "alpha": 4, "density_per_km2": 70},
///       "theta_d_db": 0, "theta_2_db": 0,
///       "eta": 0.5, "device_density_per_km2": 1000,   // optional, unused
///       "window_half_width_km": 45                    // optional
///     }
///
/// Thresholds are converted from dB to linear here. Throws ConfigError on
/// missing keys, wrong types or invalid values.
Scenario parse_scenario(const nlohmann::json& j);

Scenario load_scenario(const std::filesystem::path& path);

nlohmann::json to_json(const Scenario& s);

} // namespace metasir
