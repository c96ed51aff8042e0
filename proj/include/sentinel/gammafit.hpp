// Gamma model of nominal reconstruction errors: density, distribution and
// quantile functions, maximum-likelihood fitting and threshold estimation.
//
// Parametrization is shape/RATE throughout:
//     f(x) = rate^shape / Gamma(shape) * x^(shape-1) * exp(-rate * x),
// so the mean is shape / rate. The maximum-likelihood rate is shape / mean(e).
#pragma once

#include <sentinel/csv.hpp>
#include <sentinel/error.hpp>
#include <sentinel/error_series.hpp>
#include <sentinel/special.hpp>

#include <json.hpp>

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>

namespace sentinel {

struct GammaParams {
    double shape_alpha = 1.0;
    double rate_beta = 1.0;

    GammaParams() = default;
    GammaParams(double shape, double rate) : shape_alpha(shape), rate_beta(rate) {
        if (!(shape > 0.0) || !(rate > 0.0) || !std::isfinite(shape) || !std::isfinite(rate))
            throw UsageError("gamma parameters must be positive and finite");
    }

    double mean() const noexcept { return shape_alpha / rate_beta; }
    double variance() const noexcept { return shape_alpha / (rate_beta * rate_beta); }

    friend bool operator==(const GammaParams&, const GammaParams&) = default;
};

struct ThresholdSpec {
    double epsilon = 0.05;
    double theta = 0.0;
};

inline double gamma_log_pdf(double x, const GammaParams& p) {
    if (!(x > 0.0))
        throw std::domain_error("gamma_pdf: x must be positive");
    const double a = p.shape_alpha;
    const double b = p.rate_beta;
    return a * std::log(b) - log_gamma(a) + (a - 1.0) * std::log(x) - b * x;
}

inline double gamma_pdf(double x, const GammaParams& p) { return std::exp(gamma_log_pdf(x, p)); }

inline double gamma_cdf(double x, const GammaParams& p) {
    if (!(x > 0.0))
        throw std::domain_error("gamma_cdf: x must be positive");
    return regularized_gamma_p(p.shape_alpha, p.rate_beta * x);
}

/// Average log-likelihood of the samples under p.
inline double gamma_log_likelihood(std::span<const double> samples, const GammaParams& p) {
    double total = 0.0;
    for (double x : samples)
        total += gamma_log_pdf(x, p);
    return total / static_cast<double>(samples.size());
}

/// Quantile function: bisection to a narrow bracket, then Newton steps with
/// the density as derivative, kept inside the bracket.
inline double gamma_inverse_cdf(double prob, const GammaParams& p) {
    if (!(prob > 0.0 && prob < 1.0))
        throw std::domain_error("gamma_inverse_cdf: probability must lie in (0, 1)");
    const double a = p.shape_alpha;
    const bool upper = prob > 0.5;
    // Increasing in y; works on whichever tail keeps full precision.
    auto residual = [&](double y) {
        return upper ? (1.0 - prob) - regularized_gamma_q(a, y) : regularized_gamma_p(a, y) - prob;
    };
    auto unit_density = [&](double y) { return std::exp((a - 1.0) * std::log(y) - y - log_gamma(a)); };

    double lo = 0.0;
    double hi = std::max(a, 1.0);
    while (residual(hi) < 0.0) {
        lo = hi;
        hi *= 2.0;
        if (!std::isfinite(hi))
            throw NumericalError("gamma_inverse_cdf: failed to bracket quantile");
    }
    for (int i = 0; i < 200 && hi - lo > 1e-4 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (residual(mid) < 0.0 ? lo : hi) = mid;
    }
    double y = 0.5 * (lo + hi);
    for (int i = 0; i < 100; ++i) {
        const double r = residual(y);
        if (r == 0.0)
            break;
        (r < 0.0 ? lo : hi) = y;
        const double density = unit_density(y);
        double next = density > 0.0 ? y - r / density : 0.5 * (lo + hi);
        if (!(next > lo && next < hi))
            next = 0.5 * (lo + hi);
        const bool done = std::abs(next - y) <= 1e-15 * y;
        y = next;
        if (done || hi - lo <= 4e-16 * hi)
            break;
    }
    return y / p.rate_beta;
}

/// theta = F^-1(1 - epsilon); errors >= theta are anomalous.
inline ThresholdSpec estimate_threshold(const GammaParams& p, double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw UsageError("epsilon must lie in (0, 1)");
    return ThresholdSpec{epsilon, gamma_inverse_cdf(1.0 - epsilon, p)};
}

struct GammaFitOptions {
    double relative_tolerance = 1e-10;
    int max_iterations = 100;
};

/// Maximum-likelihood fit. With s = ln(mean) - mean(ln e), the shape solves
/// ln(a) - digamma(a) = s by Newton's method from Minka's closed-form start;
/// the rate is then shape / mean.
inline GammaParams fit_gamma_mle(std::span<const double> errors, const GammaFitOptions& options = {}) {
    if (errors.size() < 2)
        throw UsageError("fit_gamma_mle: need at least two samples");
    bool all_equal = true;
    double sum = 0.0;
    double log_sum = 0.0;
    for (double e : errors) {
        if (!(e > 0.0) || !std::isfinite(e))
            throw DegenerateDataError("fit_gamma_mle: samples must be positive and finite");
        all_equal = all_equal && e == errors[0];
        sum += e;
        log_sum += std::log(e);
    }
    if (all_equal)
        throw DegenerateDataError("fit_gamma_mle: zero sample variance (all samples equal)");
    const double n = static_cast<double>(errors.size());
    const double mean = sum / n;
    const double s = std::log(mean) - log_sum / n;
    if (!(s > 0.0))
        throw DegenerateDataError("fit_gamma_mle: degenerate data (log-mean gap is not positive)");

    double alpha = (3.0 - s + std::sqrt((s - 3.0) * (s - 3.0) + 24.0 * s)) / (12.0 * s);
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        const double f = std::log(alpha) - digamma(alpha) - s;
        const double slope = 1.0 / alpha - trigamma(alpha);
        double next = alpha - f / slope;
        if (!(next > 0.0))
            next = 0.5 * alpha;
        const bool converged = std::abs(next - alpha) < options.relative_tolerance * next;
        alpha = next;
        if (converged)
            return GammaParams(alpha, alpha / mean);
    }
    throw NumericalError("fit_gamma_mle: Newton iteration did not converge");
}

inline GammaParams fit_gamma_mle(const ErrorSeries& errors, const GammaFitOptions& options = {}) {
    return fit_gamma_mle(std::span<const double>(errors.values), options);
}

// ---------------------------------------------------------------------------
// {"alpha":..,"rate":..,"epsilon":..,"theta":..} with 17 significant digits.

inline std::string threshold_to_json(const GammaParams& p, const ThresholdSpec& t,
                                     std::optional<std::size_t> sample_count = std::nullopt) {
    std::string out = "{\n";
    out += "  \"alpha\": " + format_real17(p.shape_alpha) + ",\n";
    out += "  \"rate\": " + format_real17(p.rate_beta) + ",\n";
    out += "  \"epsilon\": " + format_real17(t.epsilon) + ",\n";
    out += "  \"theta\": " + format_real17(t.theta);
    if (sample_count)
        out += ",\n  \"samples\": " + std::to_string(*sample_count);
    out += "\n}\n";
    return out;
}

struct FittedThreshold {
    GammaParams params;
    ThresholdSpec threshold;
};

inline FittedThreshold threshold_from_json(const std::string& text) {
    try {
        const auto j = nlohmann::json::parse(text);
        FittedThreshold out{GammaParams(j.at("alpha").get<double>(), j.at("rate").get<double>()),
                            ThresholdSpec{j.at("epsilon").get<double>(), j.at("theta").get<double>()}};
        if (!(out.threshold.epsilon > 0.0 && out.threshold.epsilon < 1.0) || !(out.threshold.theta > 0.0))
            throw UsageError("threshold JSON: epsilon or theta out of range");
        return out;
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("threshold JSON: ") + e.what(), e.byte);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("threshold JSON: ") + e.what());
    }
}

} // namespace sentinel
