#pragma once

#include <optional>

#include "metasir/network_model.hpp"
#include "metasir/special_functions.hpp"

namespace metasir {

/// A moment M_b of the conditional success probability, or a marker that
/// the defining integral diverges (only possible for real b < 0).
class MomentValue {
public:
    explicit MomentValue(Complex value) : value_(value) {}

    static MomentValue divergent() { return MomentValue(); }

    bool is_divergent() const noexcept { return !value_.has_value(); }

    /// Throws DivergentMomentError for the divergent marker.
    Complex value() const;

    /// Real part of value(); throws like value().
    double real() const { return value().real(); }

private:
    MomentValue() = default;
    std::optional<Complex> value_;
};

/// M_{b,k}: b-th moment of the device CSP restricted to devices served by tier k,
/// 1 / (lambda_jk (P_jk B_jk)^{2/alpha_j} + 2F1(b, -2/alpha_k; 1 - 2/alpha_k; -theta_d)).
MomentValue moment_tier(Complex b, const NetworkConfig& config, Tier k, const QuadratureSettings& q = {});

/// M_{b,FH}: b-th moment of the MBS-to-relay CSP, 1 / 2F1(b, -2/alpha_1; 1 - 2/alpha_1; -theta_2).
MomentValue moment_first_hop(Complex b, const NetworkConfig& config, const QuadratureSettings& q = {});

/// M_{b,FH} * M_{b,2}.
MomentValue moment_dual_hop(Complex b, const NetworkConfig& config, const QuadratureSettings& q = {});

/// M_{b,FH} M_{b,2} + M_{b,1}.
MomentValue moment_total(Complex b, const NetworkConfig& config, const QuadratureSettings& q = {});

/// M_{1,total}.
double coverage_probability(const NetworkConfig& config);

/// M_{2,total} - M_{1,total}^2, clamped at zero against rounding.
double csp_variance(const NetworkConfig& config);

/// M_{-1,total}; divergent when retransmissions never settle.
MomentValue mean_local_delay(const NetworkConfig& config);

} // namespace metasir
