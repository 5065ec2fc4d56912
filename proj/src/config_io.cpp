#include "metasir/config_io.hpp"

#include <cmath>
#include <fstream>

#include "metasir/errors.hpp"

namespace metasir {

namespace {

double number_at(const nlohmann::json& obj, const char* key, const std::string& where)
{
    if (!obj.contains(key)) {
        throw ConfigError(where + ": missing key '" + key + "'");
    }
    const auto& v = obj.at(key);
    if (!v.is_number()) {
        throw ConfigError(where + ": '" + key + "' must be a number");
    }
    return v.get<double>();
}

std::optional<double> optional_number(const nlohmann::json& obj, const char* key)
{
    if (!obj.contains(key) || obj.at(key).is_null()) {
        return std::nullopt;
    }
    if (!obj.at(key).is_number()) {
        throw ConfigError(std::string("'") + key + "' must be a number");
    }
    return obj.at(key).get<double>();
}

TierParams parse_tier(const nlohmann::json& j, const char* name)
{
    if (!j.contains(name) || !j.at(name).is_object()) {
        throw ConfigError(std::string("missing object '") + name + "'");
    }
    const auto& t = j.at(name);
    return TierParams{number_at(t, "power_w", name), number_at(t, "bias", name), number_at(t, "alpha", name),
                      number_at(t, "density_per_km2", name)};
}

nlohmann::json tier_json(const TierParams& t)
{
    return {{"power_w", t.power}, {"bias", t.bias}, {"alpha", t.path_loss_exponent}, {"density_per_km2", t.density}};
}

} // namespace

Scenario parse_scenario(const nlohmann::json& j)
{
    if (!j.is_object()) {
        throw ConfigError("scenario must be a JSON object");
    }
    Scenario s;
    s.network.tier1 = parse_tier(j, "tier1");
    s.network.tier2 = parse_tier(j, "tier2");
    s.network.theta_d = db_to_linear(number_at(j, "theta_d_db", "scenario"));
    s.network.theta_2 = db_to_linear(number_at(j, "theta_2_db", "scenario"));
    s.network.unused_spectrum_fraction = optional_number(j, "eta");
    s.network.unused_device_density = optional_number(j, "device_density_per_km2");
    s.window_half_width_km = optional_number(j, "window_half_width_km");
    if (s.window_half_width_km && !(*s.window_half_width_km > 0.0)) {
        throw ConfigError("window_half_width_km must be positive");
    }
    try {
        s.network.validate();
    }
    catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
    return s;
}

Scenario load_scenario(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    nlohmann::json j;
    try {
        in >> j;
    }
    catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed JSON in " + path.string() + ": " + e.what());
    }
    return parse_scenario(j);
}

nlohmann::json to_json(const Scenario& s)
{
    nlohmann::json j;
    j["tier1"] = tier_json(s.network.tier1);
    j["tier2"] = tier_json(s.network.tier2);
    j["theta_d_db"] = linear_to_db(s.network.theta_d);
    j["theta_2_db"] = linear_to_db(s.network.theta_2);
    if (s.network.unused_spectrum_fraction) {
        j["eta"] = *s.network.unused_spectrum_fraction;
    }
    if (s.network.unused_device_density) {
        j["device_density_per_km2"] = *s.network.unused_device_density;
    }
    if (s.window_half_width_km) {
        j["window_half_width_km"] = *s.window_half_width_km;
    }
    return j;
}

} // namespace metasir
