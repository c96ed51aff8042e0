// Special functions behind the gamma model: log-gamma, digamma, trigamma
// and the regularized incomplete gamma functions.
#pragma once

#include <sentinel/error.hpp>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace sentinel {

namespace detail {

inline void require_positive(double z, const char* fn) {
    if (!(z > 0.0) || !std::isfinite(z))
        throw std::domain_error(std::string(fn) + ": argument must be positive and finite");
}

// Lanczos approximation, g = 7, nine coefficients.
inline constexpr double kLanczosG = 7.0;
inline constexpr std::array<double, 9> kLanczosCoefficients{
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

inline double log_gamma_lanczos(double z) {
    // Valid for z >= 0.5.
    z -= 1.0;
    double series = kLanczosCoefficients[0];
    for (std::size_t i = 1; i < kLanczosCoefficients.size(); ++i)
        series += kLanczosCoefficients[i] / (z + static_cast<double>(i));
    const double t = z + kLanczosG + 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (z + 0.5) * std::log(t) - t + std::log(series);
}

} // namespace detail

/// ln Gamma(z) for z > 0.
inline double log_gamma(double z) {
    detail::require_positive(z, "log_gamma");
    // Exact at the integers where ln Gamma vanishes.
    if (z == 1.0 || z == 2.0)
        return 0.0;
    if (z < 0.5)
        return std::log(std::numbers::pi / std::sin(std::numbers::pi * z)) - detail::log_gamma_lanczos(1.0 - z);
    return detail::log_gamma_lanczos(z);
}

/// psi(z) = d/dz ln Gamma(z), for z > 0.
inline double digamma(double z) {
    detail::require_positive(z, "digamma");
    double result = 0.0;
    while (z < 10.0) {
        result -= 1.0 / z;
        z += 1.0;
    }
    const double inv = 1.0 / z;
    const double inv2 = inv * inv;
    // Asymptotic expansion in Bernoulli numbers.
    const double tail =
        inv2 * (1.0 / 12 -
                inv2 * (1.0 / 120 -
                        inv2 * (1.0 / 252 -
                                inv2 * (1.0 / 240 - inv2 * (1.0 / 132 - inv2 * (691.0 / 32760 - inv2 / 12.0))))));
    return result + std::log(z) - 0.5 * inv - tail;
}

/// psi'(z), for z > 0.
inline double trigamma(double z) {
    detail::require_positive(z, "trigamma");
    double result = 0.0;
    while (z < 10.0) {
        result += 1.0 / (z * z);
        z += 1.0;
    }
    const double inv = 1.0 / z;
    const double inv2 = inv * inv;
    const double tail =
        1.0 / 6 - inv2 * (1.0 / 30 - inv2 * (1.0 / 42 - inv2 * (1.0 / 30 - inv2 * (5.0 / 66 - inv2 * (691.0 / 2730 - inv2 * 7.0 / 6)))));
    return result + inv + 0.5 * inv2 + inv * inv2 * tail;
}

namespace detail {

inline constexpr int kIncompleteGammaMaxIterations = 100000;
inline constexpr double kIncompleteGammaEpsilon = 1e-16;

// exp(a ln x - x - ln Gamma(a)), the common prefactor.
inline double incomplete_gamma_prefactor(double a, double x) {
    return std::exp(a * std::log(x) - x - log_gamma(a));
}

// P(a, x) by its power series; converges fast for x < a + 1.
inline double lower_gamma_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < kIncompleteGammaMaxIterations; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::abs(term) < std::abs(sum) * kIncompleteGammaEpsilon)
            return sum * incomplete_gamma_prefactor(a, x);
    }
    throw NumericalError("incomplete gamma series did not converge");
}

// Q(a, x) by modified Lentz evaluation of the continued fraction; x >= a + 1.
inline double upper_gamma_fraction(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < kIncompleteGammaMaxIterations; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny)
            d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny)
            c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < kIncompleteGammaEpsilon)
            return h * incomplete_gamma_prefactor(a, x);
    }
    throw NumericalError("incomplete gamma continued fraction did not converge");
}

} // namespace detail

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
inline double regularized_gamma_p(double a, double x) {
    detail::require_positive(a, "regularized_gamma_p");
    if (!(x >= 0.0))
        throw std::domain_error("regularized_gamma_p: x must be non-negative");
    if (x == 0.0)
        return 0.0;
    if (std::isinf(x))
        return 1.0;
    if (x < a + 1.0)
        return std::min(1.0, detail::lower_gamma_series(a, x));
    return std::max(0.0, 1.0 - detail::upper_gamma_fraction(a, x));
}

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
inline double regularized_gamma_q(double a, double x) {
    detail::require_positive(a, "regularized_gamma_q");
    if (!(x >= 0.0))
        throw std::domain_error("regularized_gamma_q: x must be non-negative");
    if (x == 0.0)
        return 1.0;
    if (std::isinf(x))
        return 0.0;
    if (x < a + 1.0)
        return std::max(0.0, 1.0 - detail::lower_gamma_series(a, x));
    return std::min(1.0, detail::upper_gamma_fraction(a, x));
}

} // namespace sentinel
