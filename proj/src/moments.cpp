#include "metasir/moments.hpp"

#include <algorithm>
#include <array>

#include "metasir/errors.hpp"

namespace metasir {

Complex MomentValue::value() const
{
    if (!value_) {
        throw DivergentMomentError("moment diverges");
    }
    return *value_;
}

namespace {

bool real_negative(Complex b)
{
    return b.imag() == 0.0 && b.real() < 0.0;
}

// A denominator this close to zero sits on the phase boundary up to quadrature noise.
constexpr double kBoundaryMargin = 1e-9;

/// Memoizes hyp2f1_line for one order b; the three hypergeometric factors of
/// the total moment coincide whenever the tiers share alpha and theta_d == theta_2.
class LineValues {
public:
    LineValues(Complex b, const QuadratureSettings& q) : b_(b), q_(q) {}

    Complex operator()(double alpha, double theta)
    {
        for (std::size_t i = 0; i < size_; ++i) {
            if (entries_[i].alpha == alpha && entries_[i].theta == theta) {
                return entries_[i].value;
            }
        }
        const Complex v = hyp2f1_line(b_, alpha, theta, q_);
        if (size_ < entries_.size()) {
            entries_[size_++] = Entry{alpha, theta, v};
        }
        return v;
    }

private:
    struct Entry {
        double alpha;
        double theta;
        Complex value;
    };
    Complex b_;
    QuadratureSettings q_;
    std::array<Entry, 3> entries_{};
    std::size_t size_ = 0;
};

MomentValue tier_from_line(Complex b, double competing, Complex line)
{
    const Complex denom = competing + line;
    if (real_negative(b) && denom.real() <= kBoundaryMargin) {
        return MomentValue::divergent();
    }
    return MomentValue(1.0 / denom);
}

MomentValue first_hop_from_line(Complex b, Complex line)
{
    if (real_negative(b) && line.real() <= kBoundaryMargin) {
        return MomentValue::divergent();
    }
    return MomentValue(1.0 / line);
}

MomentValue tier_moment(Complex b, const NetworkConfig& config, Tier k, LineValues& lines)
{
    const double alpha_k = config.tier(k).path_loss_exponent;
    return tier_from_line(b, competing_tier_term(config, k), lines(alpha_k, config.theta_d));
}

MomentValue first_hop_moment(Complex b, const NetworkConfig& config, LineValues& lines)
{
    return first_hop_from_line(b, lines(config.tier1.path_loss_exponent, config.theta_2));
}

MomentValue product(const MomentValue& x, const MomentValue& y)
{
    if (x.is_divergent() || y.is_divergent()) {
        return MomentValue::divergent();
    }
    return MomentValue(x.value() * y.value());
}

} // namespace

MomentValue moment_tier(Complex b, const NetworkConfig& config, Tier k, const QuadratureSettings& q)
{
    config.validate();
    LineValues lines(b, q);
    return tier_moment(b, config, k, lines);
}

MomentValue moment_first_hop(Complex b, const NetworkConfig& config, const QuadratureSettings& q)
{
    config.validate();
    LineValues lines(b, q);
    return first_hop_moment(b, config, lines);
}

MomentValue moment_dual_hop(Complex b, const NetworkConfig& config, const QuadratureSettings& q)
{
    config.validate();
    LineValues lines(b, q);
    return product(first_hop_moment(b, config, lines), tier_moment(b, config, Tier::Relay, lines));
}

MomentValue moment_total(Complex b, const NetworkConfig& config, const QuadratureSettings& q)
{
    config.validate();
    LineValues lines(b, q);
    const MomentValue dual = product(first_hop_moment(b, config, lines), tier_moment(b, config, Tier::Relay, lines));
    const MomentValue direct = tier_moment(b, config, Tier::Macro, lines);
    if (dual.is_divergent() || direct.is_divergent()) {
        return MomentValue::divergent();
    }
    return MomentValue(dual.value() + direct.value());
}

double coverage_probability(const NetworkConfig& config)
{
    return moment_total(1.0, config).real();
}

double csp_variance(const NetworkConfig& config)
{
    const double m1 = moment_total(1.0, config).real();
    const double m2 = moment_total(2.0, config).real();
    return std::max(0.0, m2 - m1 * m1);
}

MomentValue mean_local_delay(const NetworkConfig& config)
{
    return moment_total(-1.0, config);
}

} // namespace metasir
