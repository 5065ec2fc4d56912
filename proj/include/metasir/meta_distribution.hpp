#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "metasir/moments.hpp"

namespace metasir {

enum class CurveMethod { GilPelaez, Beta, Empirical };

std::string_view to_string(CurveMethod m);

/// Parses "gil-pelaez", "beta" or "empirical"; throws DomainError otherwise.
CurveMethod parse_curve_method(std::string_view name);

struct CurvePoint {
    double x;
    double ccdf;
};

struct CurveFailure {
    double x;
    std::string message;
};

/// Sampled reliability curve x -> P(CSP > x).
struct MetaCurve {
    CurveMethod method = CurveMethod::Beta;
    std::vector<CurvePoint> points;
    std::vector<CurveFailure> failures;

    bool complete() const noexcept { return failures.empty(); }

    /// x strictly increasing and ccdf non-increasing up to tolerance.
    bool well_formed(double tolerance = 1e-3) const;
};

/// Numerical recipe for the Gil-Pelaez inversion. The outer integral runs over
/// [t_start, T]; T starts at initial_cutoff and doubles until the newest octave
/// contributes less than octave_tolerance. Each octave is split into panels at
/// multiples of pi/|ln x| so every panel spans at most half an oscillation.
struct GilPelaezSettings {
    double t_start = 1e-6;
    double initial_cutoff = 200.0;
    double octave_tolerance = 1e-4;
    double max_cutoff = 1.0e5;
    double max_error = 1e-3;
    QuadratureSettings panel{1e-9, 1e-8, 200};
    QuadratureSettings moments{1e-10, 1e-8, 20000};
};

struct GilPelaezResult {
    double ccdf = 0.0;         // clamped to [0, 1]
    double unclamped = 0.0;
    double error_estimate = 0.0; // panel errors plus the last octave's magnitude
    double cutoff = 0.0;       // final truncation point T
};

/// Exact meta distribution by Gil-Pelaez inversion of the imaginary moments
/// M_{jt,total}. Throws DomainError unless 0 < x < 1 and QuadratureError when
/// the error estimate exceeds settings.max_error.
GilPelaezResult gil_pelaez(double x, const NetworkConfig& config, const GilPelaezSettings& settings = {});

double gil_pelaez_ccdf(double x, const NetworkConfig& config, const GilPelaezSettings& settings = {});

struct BetaShape {
    double a;          // beta * M1 / (1 - M1)
    double beta_param; // (M1 - M2)(1 - M1) / (M2 - M1^2)

    double mean() const noexcept { return a / (a + beta_param); }
};

/// Moment-matched Beta shape. Throws DegenerateDistributionError when
/// M1 >= 1 - 1e-12, M1 <= 1e-12 or M2 - M1^2 <= 1e-14, and DomainError when
/// the pair cannot be moments of a [0, 1] variable.
BetaShape beta_shape_from_moments(double m1, double m2);

BetaShape beta_shape(const NetworkConfig& config);

double beta_ccdf(double x, const BetaShape& shape);

/// 1 - I_x(a, beta) with the shape matched to M_{1,total}, M_{2,total}.
double beta_ccdf(double x, const NetworkConfig& config);

/// Evaluates the chosen analytic method on a strictly increasing grid in (0, 1).
/// Per-point failures land in MetaCurve::failures. A degenerate Beta fit falls
/// back to the step function at M1. CurveMethod::Empirical is rejected here;
/// empirical curves come from the simulator.
MetaCurve meta_curve(const NetworkConfig& config, std::span<const double> xs, CurveMethod method,
                     const GilPelaezSettings& settings = {});

} // namespace metasir
