#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <queue>
#include <string>
#include <type_traits>
#include <vector>

#include "metasir/errors.hpp"

namespace metasir {

struct QuadratureSettings {
    double abs_tol = 1e-10;
    double rel_tol = 1e-9;
    int max_subdivisions = 2000;
};

template <class T>
struct QuadratureResult {
    T value{};
    double error = 0.0;
    int subdivisions = 0;
};

namespace detail {

// 21-point Gauss-Kronrod abscissae on [-1, 1] (non-negative half), QUADPACK qk21.
inline constexpr double kKronrodNodes[11] = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

inline constexpr double kKronrodWeights[11] = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600525478340, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

// Weights of the embedded 10-point Gauss rule, at kKronrodNodes[1], [3], ..., [9].
inline constexpr double kGaussWeights[5] = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

template <class T>
double magnitude(const T& v)
{
    return std::abs(v);
}

template <class T>
struct Panel {
    double a;
    double b;
    T value;
    double error;
    bool operator<(const Panel& other) const { return error < other.error; }
};

/// One G10K21 pass on [a, b]. Error estimate follows the QUADPACK heuristic.
template <class F, class T>
Panel<T> kronrod21(const F& f, double a, double b)
{
    const double center = 0.5 * (a + b);
    const double half = 0.5 * (b - a);

    T fv[21];
    const T fc = f(center);
    fv[20] = fc;
    T kronrod = fc * kKronrodWeights[10];
    T gauss{};
    for (int i = 0; i < 10; ++i) {
        const double dx = half * kKronrodNodes[i];
        const T f1 = f(center - dx);
        const T f2 = f(center + dx);
        fv[2 * i] = f1;
        fv[2 * i + 1] = f2;
        kronrod += (f1 + f2) * kKronrodWeights[i];
        if (i % 2 == 1) {
            gauss += (f1 + f2) * kGaussWeights[i / 2];
        }
    }

    const T mean = kronrod * 0.5;
    double resasc = kKronrodWeights[10] * magnitude(fc - mean);
    for (int i = 0; i < 10; ++i) {
        resasc += kKronrodWeights[i] * (magnitude(fv[2 * i] - mean) + magnitude(fv[2 * i + 1] - mean));
    }
    resasc *= std::abs(half);

    double err = magnitude((kronrod - gauss) * half);
    if (resasc != 0.0 && err != 0.0) {
        err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
    }
    return Panel<T>{a, b, kronrod * half, err};
}

template <class T>
void resum(std::priority_queue<Panel<T>> panels, T& total, double& total_error)
{
    total = T{};
    total_error = 0.0;
    while (!panels.empty()) {
        total += panels.top().value;
        total_error += panels.top().error;
        panels.pop();
    }
}

template <class T>
std::complex<double> as_complex(const T& v)
{
    return std::complex<double>(v);
}

} // namespace detail

/// Globally adaptive Gauss-Kronrod integration of f over [a, b].
///
/// The panel with the largest error estimate is bisected until the summed
/// error meets max(abs_tol, rel_tol * |value|). f may return double or
/// std::complex<double>. Endpoints are never evaluated, so integrable
/// endpoint singularities are allowed.
///
/// Throws QuadratureError (with the partial estimate) once more than
/// settings.max_subdivisions panels would be needed.
template <class F>
auto integrate_adaptive(const F& f, double a, double b, const QuadratureSettings& settings = {})
    -> QuadratureResult<std::decay_t<decltype(f(a))>>
{
    using T = std::decay_t<decltype(f(a))>;
    if (!(settings.abs_tol > 0.0) || !(settings.rel_tol > 0.0) || settings.max_subdivisions < 1) {
        throw DomainError("integrate_adaptive: tolerances must be positive and max_subdivisions >= 1");
    }
    if (a == b) {
        return {T{}, 0.0, 0};
    }

    std::priority_queue<detail::Panel<T>> panels;
    panels.push(detail::kronrod21<F, T>(f, a, b));
    T total = panels.top().value;
    double total_error = panels.top().error;
    int count = 1;

    auto tolerance = [&] { return std::max(settings.abs_tol, settings.rel_tol * detail::magnitude(total)); };

    while (total_error > tolerance()) {
        if (count >= settings.max_subdivisions) {
            throw QuadratureError("adaptive quadrature did not converge within " +
                                      std::to_string(settings.max_subdivisions) + " subdivisions",
                                  detail::as_complex(total), total_error);
        }
        const detail::Panel<T> worst = panels.top();
        panels.pop();
        const double mid = 0.5 * (worst.a + worst.b);
        const auto left = detail::kronrod21<F, T>(f, worst.a, mid);
        const auto right = detail::kronrod21<F, T>(f, mid, worst.b);
        total += left.value + right.value - worst.value;
        total_error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++count;

        // Running sums drift; refresh them from the panels now and then.
        if (count % 64 == 0) {
            detail::resum(panels, total, total_error);
        }
    }
    detail::resum(panels, total, total_error);
    return {total, total_error, count};
}

} // namespace metasir
