#include "metasir/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "metasir/errors.hpp"

namespace metasir {

Complex expm1(Complex z)
{
    const double x = z.real();
    const double y = z.imag();
    if (y == 0.0) {
        return {std::expm1(x), 0.0};
    }
    const double half_sin = std::sin(0.5 * y);
    // e^x cos y - 1 = expm1(x) cos y - 2 sin^2(y/2)
    return {std::expm1(x) * std::cos(y) - 2.0 * half_sin * half_sin, std::exp(x) * std::sin(y)};
}

namespace {

Complex hyp2f1_real_axis(Complex b, double alpha, double theta, const QuadratureSettings& settings)
{
    const double half_alpha = 0.5 * alpha;
    // Near s = 0 the integrand behaves like s^{alpha/2 - 2}; s = w^m with
    // m = 2 / (alpha - 2) makes it bounded in w.
    const double m = std::max(1.0, 2.0 / (alpha - 2.0));
    // 1 - (1 + theta s^{alpha/2})^{-b} = -expm1(-b log1p(theta s^{alpha/2}))
    auto integrand = [&](double w) -> Complex {
        if (w == 0.0) {
            return 0.0;
        }
        const double s = std::pow(w, m);
        const double log_base = std::log1p(theta * std::pow(s, half_alpha));
        return -expm1(-b * log_base) / (s * s) * (m * s / w);
    };
    return 1.0 + integrate_adaptive(integrand, 0.0, 1.0, settings).value;
}

// Im b > 0. With y = theta s^{alpha/2}, integration by parts and u = log(1 + y),
//
//     F(b) = (1 + theta)^{-b} + b theta^delta \int_0^L e^{-bu} (e^u - 1)^{-delta} du,
//
// L = log(1 + theta). The u-path is pushed into the lower half plane
// (0 -> -iV -> L - iV -> L), where e^{-bu} decays instead of oscillating.
Complex hyp2f1_contour(Complex b, double alpha, double theta, const QuadratureSettings& settings)
{
    using namespace std::complex_literals;
    constexpr double kDecay = 50.0;
    const double delta = 2.0 / alpha;
    const double t = b.imag();
    const double big_l = std::log1p(theta);
    const double depth = std::min(0.5 * std::numbers::pi, kDecay / t);

    // Leg 0 -> -iV with v = w^p, p = 1/(1 - delta), which absorbs v^{-delta}.
    const double p = 1.0 / (1.0 - delta);
    const Complex rotation = std::pow(Complex(0.0, -1.0), -delta);
    auto leg_down = [&](double w) -> Complex {
        const double v = std::pow(w, p);
        if (v == 0.0) {
            return p;
        }
        const Complex u(0.0, -v);
        return p * std::exp(1i * b * v) * std::pow(expm1(u) / u, -delta);
    };
    Complex integral = -1i * rotation * integrate_adaptive(leg_down, 0.0, std::pow(depth, 1.0 / p), settings).value;

    auto leg_up = [&](double v) -> Complex {
        const Complex u(big_l, -v);
        return std::exp(-b * u) * std::pow(expm1(u), -delta);
    };
    integral += 1i * integrate_adaptive(leg_up, 0.0, depth, settings).value;

    if (t * depth < kDecay) {
        auto leg_across = [&](double x) -> Complex {
            const Complex u(x, -depth);
            return std::exp(-b * u) * std::pow(expm1(u), -delta);
        };
        integral += integrate_adaptive(leg_across, 0.0, big_l, settings).value;
    }
    return std::exp(-b * big_l) + b * std::pow(theta, delta) * integral;
}

} // namespace

Complex hyp2f1_line(Complex b, double alpha, double theta, const QuadratureSettings& settings)
{
    if (!(alpha > 2.0) || !std::isfinite(alpha)) {
        throw DomainError("hyp2f1_line: path-loss exponent must exceed 2");
    }
    if (!(theta >= 0.0) || !std::isfinite(theta)) {
        throw DomainError("hyp2f1_line: threshold must be finite and non-negative");
    }
    if (!std::isfinite(b.real()) || !std::isfinite(b.imag())) {
        throw DomainError("hyp2f1_line: order must be finite");
    }
    if (theta == 0.0 || b == Complex{0.0, 0.0}) {
        return {1.0, 0.0};
    }
    if (b.imag() == 0.0) {
        return {hyp2f1_real_axis(b, alpha, theta, settings).real(), 0.0};
    }
    if (b.imag() < 0.0) {
        return std::conj(hyp2f1_contour(std::conj(b), alpha, theta, settings));
    }
    return hyp2f1_contour(b, alpha, theta, settings);
}

namespace {

// Modified Lentz evaluation of the incomplete-Beta continued fraction.
double beta_continued_fraction(double x, double a, double b)
{
    constexpr int kMaxIterations = 100000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) {
        d = kTiny;
    }
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIterations; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        h *= d * c;

        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) {
            d = kTiny;
        }
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) {
            c = kTiny;
        }
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kEps) {
            return h;
        }
    }
    throw QuadratureError("reg_inc_beta: continued fraction did not converge", h, std::numeric_limits<double>::infinity());
}

} // namespace

double reg_inc_beta(double x, double a, double b)
{
    if (!(a > 0.0) || !(b > 0.0) || !std::isfinite(a) || !std::isfinite(b)) {
        throw DomainError("reg_inc_beta: shape parameters must be positive and finite");
    }
    if (!(x >= 0.0 && x <= 1.0)) {
        throw DomainError("reg_inc_beta: x must lie in [0, 1]");
    }
    if (x == 0.0) {
        return 0.0;
    }
    if (x == 1.0) {
        return 1.0;
    }

    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    double value;
    if (x < (a + 1.0) / (a + b + 2.0)) {
        value = front * beta_continued_fraction(x, a, b) / a;
    }
    else {
        value = 1.0 - front * beta_continued_fraction(1.0 - x, b, a) / b;
    }
    return std::clamp(value, 0.0, 1.0);
}

} // namespace metasir
