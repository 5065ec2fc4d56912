#include "metasir/meta_distribution.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "metasir/errors.hpp"

namespace metasir {

std::string_view to_string(CurveMethod m)
{
    switch (m) {
    case CurveMethod::GilPelaez:
        return "gil-pelaez";
    case CurveMethod::Beta:
        return "beta";
    case CurveMethod::Empirical:
        return "empirical";
    }
    return "unknown";
}

CurveMethod parse_curve_method(std::string_view name)
{
    if (name == "gil-pelaez") {
        return CurveMethod::GilPelaez;
    }
    if (name == "beta") {
        return CurveMethod::Beta;
    }
    if (name == "empirical") {
        return CurveMethod::Empirical;
    }
    throw DomainError("unknown curve method '" + std::string(name) + "'");
}

bool MetaCurve::well_formed(double tolerance) const
{
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i].x > points[i - 1].x)) {
            return false;
        }
        if (points[i].ccdf > points[i - 1].ccdf + tolerance) {
            return false;
        }
    }
    return std::all_of(points.begin(), points.end(), [](const CurvePoint& p) { return p.ccdf >= 0.0 && p.ccdf <= 1.0; });
}

GilPelaezResult gil_pelaez(double x, const NetworkConfig& config, const GilPelaezSettings& settings)
{
    if (!(x > 0.0 && x < 1.0)) {
        throw DomainError("gil_pelaez: x must lie in (0, 1)");
    }
    if (!(settings.t_start > 0.0) || !(settings.initial_cutoff > settings.t_start) ||
        !(settings.max_cutoff >= settings.initial_cutoff)) {
        throw DomainError("gil_pelaez: need 0 < t_start < initial_cutoff <= max_cutoff");
    }
    config.validate();

    const double log_x = std::log(x);
    auto integrand = [&](double t) -> double {
        const Complex m = moment_total(Complex(0.0, t), config, settings.moments).value();
        return (std::polar(1.0, -t * log_x) * m).imag() / t;
    };

    // Panel boundaries sit at the zeros of sin/cos(t ln x).
    const double spacing = std::numbers::pi / std::abs(log_x);
    double error = 0.0;
    auto integrate_range = [&](double lo, double hi) {
        double sum = 0.0;
        double a = lo;
        for (auto k = static_cast<long long>(std::floor(lo / spacing)) + 1; a < hi; ++k) {
            const double b = std::min(hi, static_cast<double>(k) * spacing);
            if (b <= a) {
                continue;
            }
            const auto r = integrate_adaptive(integrand, a, b, settings.panel);
            sum += r.value;
            error += r.error;
            a = b;
        }
        return sum;
    };

    double cutoff = settings.initial_cutoff;
    const double half_cutoff = std::max(settings.t_start, 0.5 * cutoff);
    double last_octave = integrate_range(half_cutoff, cutoff);
    double integral = integrate_range(settings.t_start, half_cutoff) + last_octave;
    for (;;) {
        if (2.0 * cutoff > settings.max_cutoff) {
            error += std::abs(last_octave);
            break;
        }
        last_octave = integrate_range(cutoff, 2.0 * cutoff);
        integral += last_octave;
        cutoff *= 2.0;
        if (std::abs(last_octave) < settings.octave_tolerance) {
            error += std::abs(last_octave);
            break;
        }
    }

    const double raw = 0.5 + integral / std::numbers::pi;
    const double error_estimate = error / std::numbers::pi;
    if (error_estimate > settings.max_error) {
        throw QuadratureError("gil_pelaez: error estimate " + std::to_string(error_estimate) +
                                  " exceeds tolerance at cutoff " + std::to_string(cutoff),
                              raw, error_estimate);
    }
    return {std::clamp(raw, 0.0, 1.0), raw, error_estimate, cutoff};
}

double gil_pelaez_ccdf(double x, const NetworkConfig& config, const GilPelaezSettings& settings)
{
    return gil_pelaez(x, config, settings).ccdf;
}

BetaShape beta_shape_from_moments(double m1, double m2)
{
    if (!std::isfinite(m1) || !std::isfinite(m2)) {
        throw DomainError("beta_shape: moments must be finite");
    }
    if (m1 >= 1.0 - 1e-12 || m1 <= 1e-12) {
        throw DegenerateDistributionError("beta_shape: mean at the boundary of [0, 1]", std::clamp(m1, 0.0, 1.0));
    }
    const double variance = m2 - m1 * m1;
    if (variance <= 1e-14) {
        throw DegenerateDistributionError("beta_shape: variance vanishes", m1);
    }
    if (m2 >= m1) {
        throw DomainError("beta_shape: M2 >= M1 is impossible for a [0, 1]-valued variable");
    }
    const double beta = (m1 - m2) * (1.0 - m1) / variance;
    return {beta * m1 / (1.0 - m1), beta};
}

BetaShape beta_shape(const NetworkConfig& config)
{
    return beta_shape_from_moments(moment_total(1.0, config).real(), moment_total(2.0, config).real());
}

double beta_ccdf(double x, const BetaShape& shape)
{
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError("beta_ccdf: x must lie in [0, 1]");
    }
    return 1.0 - reg_inc_beta(x, shape.a, shape.beta_param);
}

double beta_ccdf(double x, const NetworkConfig& config)
{
    return beta_ccdf(x, beta_shape(config));
}

MetaCurve meta_curve(const NetworkConfig& config, std::span<const double> xs, CurveMethod method,
                     const GilPelaezSettings& settings)
{
    if (method == CurveMethod::Empirical) {
        throw DomainError("meta_curve: empirical curves come from the simulator");
    }
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!(xs[i] > 0.0 && xs[i] < 1.0)) {
            throw DomainError("meta_curve: grid points must lie in (0, 1)");
        }
        if (i > 0 && !(xs[i] > xs[i - 1])) {
            throw DomainError("meta_curve: grid must be strictly increasing");
        }
    }
    config.validate();

    MetaCurve curve;
    curve.method = method;
    curve.points.reserve(xs.size());

    if (method == CurveMethod::Beta) {
        std::optional<BetaShape> shape;
        double step_at = 0.0;
        try {
            shape = beta_shape(config);
        }
        catch (const DegenerateDistributionError& e) {
            step_at = e.mean();
        }
        for (double x : xs) {
            const double v = shape ? beta_ccdf(x, *shape) : (x < step_at ? 1.0 : 0.0);
            curve.points.push_back({x, v});
        }
        return curve;
    }

    for (double x : xs) {
        try {
            curve.points.push_back({x, gil_pelaez_ccdf(x, config, settings)});
        }
        catch (const std::runtime_error& e) {
            curve.failures.push_back({x, e.what()});
        }
    }
    return curve;
}

} // namespace metasir
