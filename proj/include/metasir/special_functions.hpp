#pragma once

#include <complex>

#include "metasir/quadrature.hpp"

namespace metasir {

using Complex = std::complex<double>;

/// exp(z) - 1 without cancellation for small |z|.
Complex expm1(Complex z);

/// 2F1(b, -2/alpha; 1 - 2/alpha; -theta) for complex b, via
///
///     1 + \int_0^1 (1 - (1 + theta s^{alpha/2})^{-b}) s^{-2} ds
///
/// (the u in [1, inf) form mapped with u = 1/s). Complex powers use the
/// principal branch; the base is real and >= 1, so real b gives an exactly
/// real result.
///
/// Throws DomainError for alpha <= 2, theta < 0 or non-finite b, and
/// QuadratureError if the integral does not converge.
Complex hyp2f1_line(Complex b, double alpha, double theta, const QuadratureSettings& settings = {});

/// Regularized incomplete Beta function I_x(a, b), continued fraction with
/// the usual symmetry switch. Throws DomainError unless 0 <= x <= 1, a > 0, b > 0.
double reg_inc_beta(double x, double a, double b);

} // namespace metasir
