#include "metasir/network_model.hpp"

#include <cmath>

#include "metasir/errors.hpp"

namespace metasir {

namespace {

bool positive_finite(double v)
{
    return v > 0.0 && std::isfinite(v);
}

void validate_tier(const TierParams& t, const std::string& name)
{
    if (!positive_finite(t.power)) {
        throw DomainError(name + ": power must be positive");
    }
    if (!positive_finite(t.bias)) {
        throw DomainError(name + ": bias must be positive");
    }
    if (!(t.path_loss_exponent > 2.0) || !std::isfinite(t.path_loss_exponent)) {
        throw DomainError(name + ": path-loss exponent must exceed 2");
    }
    if (!positive_finite(t.density)) {
        throw DomainError(name + ": density must be positive");
    }
}

} // namespace

std::vector<std::string> NetworkConfig::validate() const
{
    validate_tier(tier1, "tier1");
    validate_tier(tier2, "tier2");
    if (!(theta_d >= 0.0) || !std::isfinite(theta_d)) {
        throw DomainError("theta_d must be finite and non-negative");
    }
    if (!(theta_2 >= 0.0) || !std::isfinite(theta_2)) {
        throw DomainError("theta_2 must be finite and non-negative");
    }

    std::vector<std::string> warnings;
    if (unused_spectrum_fraction) {
        if (!(*unused_spectrum_fraction >= 0.0 && *unused_spectrum_fraction <= 1.0)) {
            throw DomainError("eta must lie in [0, 1]");
        }
        warnings.emplace_back("eta (spectrum fraction) is accepted but does not enter any computation");
    }
    if (unused_device_density) {
        warnings.emplace_back("device density is accepted but does not enter any computation");
    }
    return warnings;
}

NetworkConfig NetworkConfig::reference()
{
    NetworkConfig c;
    c.tier1 = TierParams{50.0, 1.0, 4.0, 2.0};
    c.tier2 = TierParams{5.0, 1.0, 4.0, 70.0};
    c.theta_d = 1.0;
    c.theta_2 = 1.0;
    return c;
}

TierRatios ratios(const NetworkConfig& config, Tier j, Tier k)
{
    if (j == k) {
        throw DomainError("ratios: tiers must differ");
    }
    const TierParams& tj = config.tier(j);
    const TierParams& tk = config.tier(k);
    return {tj.power / tk.power, tj.bias / tk.bias, tj.density / tk.density};
}

double competing_tier_term(const NetworkConfig& config, Tier k)
{
    const Tier j = other(k);
    const TierRatios r = ratios(config, j, k);
    return r.lambda_hat * std::pow(r.p_hat * r.b_hat, 2.0 / config.tier(j).path_loss_exponent);
}

double association_probability(const NetworkConfig& config, Tier k)
{
    return 1.0 / (competing_tier_term(config, k) + 1.0);
}

double db_to_linear(double db)
{
    return std::pow(10.0, db / 10.0);
}

double linear_to_db(double linear)
{
    return 10.0 * std::log10(linear);
}

} // namespace metasir
