// Reference implementations used only by the tests. They deliberately avoid
// the library's own numerics.
#pragma once

#include <sentinel/random.hpp>

#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace oracle {

// Marsaglia-Tsang squeeze method, rate parametrization.
inline double sample_gamma(sentinel::Rng& rng, double alpha, double rate) {
    if (alpha < 1.0) {
        const double u = rng.uniform();
        return sample_gamma(rng, alpha + 1.0, rate) * std::pow(u > 0.0 ? u : 1e-300, 1.0 / alpha);
    }
    const double d = alpha - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x = 0.0;
        double v = 0.0;
        do {
            x = rng.normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = rng.uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x)
            return d * v / rate;
        if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v)))
            return d * v / rate;
    }
}

inline std::vector<double> gamma_samples(std::uint64_t seed, std::size_t n, double alpha, double rate) {
    sentinel::Rng rng(seed);
    std::vector<double> out(n);
    for (auto& x : out)
        x = sample_gamma(rng, alpha, rate);
    return out;
}

// ln((n-1)!) by direct summation in long double.
inline long double ln_gamma_at_integer(int n) {
    long double acc = 0.0L;
    for (int k = 2; k < n; ++k)
        acc += std::log(static_cast<long double>(k));
    return acc;
}

namespace detail {
inline long double simpson(const std::function<long double(long double)>& f, long double a, long double b,
                           long double fa, long double fm, long double fb, long double whole, long double tol,
                           int depth) {
    const long double m = 0.5L * (a + b);
    const long double lm = 0.5L * (a + m);
    const long double rm = 0.5L * (m + b);
    const long double flm = f(lm);
    const long double frm = f(rm);
    const long double left = (m - a) / 6.0L * (fa + 4.0L * flm + fm);
    const long double right = (b - m) / 6.0L * (fm + 4.0L * frm + fb);
    const long double diff = left + right - whole;
    if (depth <= 0 || std::fabs(diff) <= 15.0L * tol)
        return left + right + diff / 15.0L;
    return simpson(f, a, m, fa, flm, fm, left, 0.5L * tol, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, 0.5L * tol, depth - 1);
}
} // namespace detail

// Adaptive Simpson quadrature in long double.
inline long double integrate(const std::function<long double(long double)>& f, long double a, long double b,
                             long double tol = 1e-15L) {
    const long double fa = f(a);
    const long double fb = f(b);
    const long double fm = f(0.5L * (a + b));
    const long double whole = (b - a) / 6.0L * (fa + 4.0L * fm + fb);
    return detail::simpson(f, a, b, fa, fm, fb, whole, tol, 60);
}

// Gamma density written out from the definition, normalizer via std::lgamma.
inline long double gamma_density(long double x, long double alpha, long double rate) {
    if (x <= 0.0L)
        return 0.0L;
    return std::exp(alpha * std::log(rate) + (alpha - 1.0L) * std::log(x) - rate * x -
                    std::lgamma(static_cast<double>(alpha)));
}

inline long double gamma_cdf_by_quadrature(long double x, long double alpha, long double rate) {
    return integrate([&](long double t) { return gamma_density(t, alpha, rate); }, 0.0L, x, 1e-17L);
}

// Quantile from the quadrature CDF by plain bisection.
inline double gamma_quantile_by_bisection(double prob, double alpha, double rate) {
    long double lo = 0.0L;
    long double hi = alpha / rate;
    while (gamma_cdf_by_quadrature(hi, alpha, rate) < prob)
        hi *= 2.0L;
    for (int i = 0; i < 200 && hi - lo > 1e-16L * hi; ++i) {
        const long double mid = 0.5L * (lo + hi);
        if (gamma_cdf_by_quadrature(mid, alpha, rate) < prob)
            lo = mid;
        else
            hi = mid;
    }
    return static_cast<double>(0.5L * (lo + hi));
}

inline double sample_variance(const std::vector<double>& v, std::size_t skip = 0) {
    double mean = 0.0;
    const std::size_t n = v.size() - skip;
    for (std::size_t i = skip; i < v.size(); ++i)
        mean += v[i];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (std::size_t i = skip; i < v.size(); ++i)
        ss += (v[i] - mean) * (v[i] - mean);
    return ss / static_cast<double>(n - 1);
}

inline double round3(double x) { return std::round(x * 1000.0) / 1000.0; }

} // namespace oracle
