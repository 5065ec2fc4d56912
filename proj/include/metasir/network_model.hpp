#pragma once

#include <optional>
#include <string>
#include <vector>

namespace metasir {

/// Tier 1 holds the macro base stations, tier 2 the decode-and-forward relays.
enum class Tier { Macro = 1, Relay = 2 };

constexpr Tier other(Tier k) noexcept
{
    return k == Tier::Macro ? Tier::Relay : Tier::Macro;
}

constexpr int index_of(Tier k) noexcept
{
    return static_cast<int>(k);
}

struct TierParams {
    double power = 1.0;              // watts
    double bias = 1.0;               // association bias, linear
    double path_loss_exponent = 4.0; // must exceed 2
    double density = 1.0;            // nodes per km^2
};

/// Network parameterization shared by the analysis and the simulator.
/// Thresholds are linear SIR ratios; dB conversion happens at the CLI boundary.
struct NetworkConfig {
    TierParams tier1;
    TierParams tier2;
    double theta_d = 1.0; // device threshold (direct link and second hop)
    double theta_2 = 1.0; // relay threshold (first hop)
    // Carried for completeness of the system description; no formula reads them.
    std::optional<double> unused_spectrum_fraction;
    std::optional<double> unused_device_density;

    const TierParams& tier(Tier k) const noexcept { return k == Tier::Macro ? tier1 : tier2; }
    TierParams& tier(Tier k) noexcept { return k == Tier::Macro ? tier1 : tier2; }

    /// Throws DomainError on an invalid parameter. Returns warnings for
    /// parameters that are accepted but have no effect.
    std::vector<std::string> validate() const;

    /// Defaults of the reference scenario: 2 MBS/km^2 at 50 W, 70 relays/km^2
    /// at 5 W, unit biases, alpha = 4, thresholds of 1 (0 dB).
    static NetworkConfig reference();
};

/// Ratios of tier-j to tier-k parameters: P_j/P_k, B_j/B_k, lambda_j/lambda_k.
struct TierRatios {
    double p_hat;
    double b_hat;
    double lambda_hat;
};

TierRatios ratios(const NetworkConfig& config, Tier j, Tier k);

/// lambda_jk (P_jk B_jk)^{2/alpha_j} with j the tier other than k: the
/// competing-tier term in the association probability and tier moments.
double competing_tier_term(const NetworkConfig& config, Tier k);

/// Unconditional probability that the typical device associates with tier k.
double association_probability(const NetworkConfig& config, Tier k);

double db_to_linear(double db);
double linear_to_db(double linear);

} // namespace metasir
