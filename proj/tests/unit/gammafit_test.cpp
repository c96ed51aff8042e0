#include "../support/oracles.hpp"

#include <sentinel/gammafit.hpp>
#include <sentinel/special.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace sentinel;

namespace {

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

} // namespace

TEST(LogGamma, KnownValues) {
    EXPECT_EQ(log_gamma(1.0), 0.0);
    EXPECT_EQ(log_gamma(2.0), 0.0);
    EXPECT_NEAR(log_gamma(5.0), std::log(24.0), 1e-13);
    EXPECT_NEAR(log_gamma(0.5), 0.5 * std::log(std::numbers::pi), 1e-13);
    // mpmath, 50 digits
    EXPECT_LT(rel(log_gamma(0.1), 2.252712651734205959869702), 1e-13);
    EXPECT_LT(rel(log_gamma(500.0), 2605.115850361733892658674), 1e-13);
}

TEST(LogGamma, FactorialsOneToTwenty) {
    for (int n = 1; n <= 20; ++n) {
        const long double want = oracle::ln_gamma_at_integer(n);
        const double tol = 1e-12 * std::max(1.0L, std::fabs(want));
        EXPECT_NEAR(log_gamma(n), static_cast<double>(want), tol) << "n=" << n;
    }
}

TEST(LogGamma, RejectsNonPositiveArguments) {
    EXPECT_THROW(log_gamma(0.0), std::domain_error);
    EXPECT_THROW(log_gamma(-3.0), std::domain_error);
}

TEST(Digamma, KnownValues) {
    EXPECT_NEAR(digamma(1.0), -0.5772156649015329, 1e-13);
    EXPECT_NEAR(trigamma(1.0), std::numbers::pi * std::numbers::pi / 6.0, 1e-12);
    EXPECT_NEAR(digamma(7.3), 1.917820335637986098367634, 1e-13);
    EXPECT_NEAR(trigamma(7.3), 0.1467957681314270981643728, 1e-13);
}

TEST(Digamma, MatchesFiniteDifferenceOfLogGamma) {
    const double h = 1e-6;
    const double fd = (log_gamma(7.3 + h) - log_gamma(7.3 - h)) / (2 * h);
    EXPECT_NEAR(digamma(7.3), fd, 1e-6);
    const double fd2 = (digamma(3.1 + h) - digamma(3.1 - h)) / (2 * h);
    EXPECT_NEAR(trigamma(3.1), fd2, 1e-6);
}

TEST(IncompleteGamma, ComplementsSumToOne) {
    for (double a : {0.3, 1.0, 4.5, 15.0, 120.0})
        for (double x : {0.01, 0.5, 3.0, 14.0, 200.0})
            EXPECT_NEAR(regularized_gamma_p(a, x) + regularized_gamma_q(a, x), 1.0, 1e-13);
}

TEST(GammaParams, RejectsNonPositive) {
    EXPECT_THROW(GammaParams(0.0, 1.0), UsageError);
    EXPECT_THROW(GammaParams(1.0, -2.0), UsageError);
    const GammaParams p(15.0, 392.0);
    EXPECT_DOUBLE_EQ(p.mean(), 15.0 / 392.0);
}

TEST(GammaPdf, ClosedForms) {
    EXPECT_NEAR(gamma_pdf(0.5, GammaParams(1, 1)), std::exp(-0.5), 1e-15);
    EXPECT_NEAR(gamma_pdf(1.0, GammaParams(2, 3)), 9.0 * std::exp(-3.0), 1e-15);
}

TEST(GammaPdf, HighPrecisionReference) {
    // mpmath, 50 digits: 392^15 / Gamma(15) * 0.038^14 * exp(-392 * 0.038)
    EXPECT_LT(rel(gamma_pdf(0.038, GammaParams(15, 392)), 40.42056720014632385311253), 1e-9);
}

TEST(GammaCdf, ClosedFormsAndLimits) {
    EXPECT_NEAR(gamma_cdf(std::log(2.0), GammaParams(1, 1)), 0.5, 1e-15);
    for (const auto& p : {GammaParams(1, 1), GammaParams(15, 392), GammaParams(0.4, 3)})
        EXPECT_NEAR(gamma_cdf(200.0 * p.mean(), p), 1.0, 1e-12);
    EXPECT_THROW(gamma_cdf(0.0, GammaParams(1, 1)), std::domain_error);
}

TEST(GammaCdf, MatchesQuadratureOfDensity) {
    const double want = static_cast<double>(oracle::gamma_cdf_by_quadrature(0.05L, 15.0L, 392.0L));
    EXPECT_NEAR(gamma_cdf(0.05, GammaParams(15, 392)), want, 1e-9);
    EXPECT_NEAR(gamma_cdf(0.05, GammaParams(15, 392)), 0.8786890286411963307887425, 1e-12);
}

TEST(GammaCdf, MonotoneOnRandomPairs) {
    Rng rng(3);
    const GammaParams p(15, 392);
    for (int i = 0; i < 1000; ++i) {
        double a = rng.uniform(1e-4, 0.15);
        double b = rng.uniform(1e-4, 0.15);
        if (a > b)
            std::swap(a, b);
        EXPECT_LE(gamma_cdf(a, p), gamma_cdf(b, p));
    }
}

TEST(GammaInverseCdf, ExponentialClosedForms) {
    EXPECT_NEAR(gamma_inverse_cdf(0.99, GammaParams(1, 1)), 4.605170185988091, 1e-9);
    EXPECT_NEAR(gamma_inverse_cdf(0.95, GammaParams(1, 1)), 2.995732273553991, 1e-9);
}

TEST(GammaInverseCdf, RoundTrip) {
    for (const auto& p : {GammaParams(1, 1), GammaParams(15, 392), GammaParams(0.3, 5), GammaParams(80, 2)})
        for (int i = 1; i <= 99; ++i) {
            const double q = i / 100.0;
            EXPECT_NEAR(gamma_cdf(gamma_inverse_cdf(q, p), p), q, 1e-9) << "alpha " << p.shape_alpha;
        }
    EXPECT_THROW(gamma_inverse_cdf(0.0, GammaParams(1, 1)), std::domain_error);
    EXPECT_THROW(gamma_inverse_cdf(1.0, GammaParams(1, 1)), std::domain_error);
}

TEST(EstimateThreshold, ClosedFormsAndMedian) {
    EXPECT_NEAR(estimate_threshold(GammaParams(1, 1), 0.01).theta, 4.605170, 1e-6);
    EXPECT_NEAR(estimate_threshold(GammaParams(1, 1), 0.05).theta, 2.995732, 1e-6);
    const GammaParams p(15, 392);
    EXPECT_NEAR(gamma_cdf(estimate_threshold(p, 0.5).theta, p), 0.5, 1e-9);
    EXPECT_THROW(estimate_threshold(p, 0.0), UsageError);
    EXPECT_THROW(estimate_threshold(p, 1.5), UsageError);
}

TEST(EstimateThreshold, AgreesWithQuadratureBisection) {
    const GammaParams p(15, 392);
    const double want = oracle::gamma_quantile_by_bisection(0.99, 15.0, 392.0);
    EXPECT_NEAR(estimate_threshold(p, 0.01).theta, want, 1e-8);
}

TEST(EstimateThreshold, SampledExceedanceWithinThreeSigma) {
    for (const auto& p : {GammaParams(15, 392), GammaParams(2.5, 40)})
        for (double eps : {0.05, 0.01}) {
            const auto samples = oracle::gamma_samples(11, 100000, p.shape_alpha, p.rate_beta);
            const double theta = estimate_threshold(p, eps).theta;
            double exceed = 0;
            for (double x : samples)
                exceed += x > theta;
            const double frac = exceed / samples.size();
            const double sd = std::sqrt(eps * (1 - eps) / samples.size());
            EXPECT_NEAR(frac, eps, 3 * sd);
        }
}

TEST(FitGammaMle, RecoversPublishedExample) {
    const auto samples = oracle::gamma_samples(42, 1000000, 15.0, 392.0);
    const auto p = fit_gamma_mle(samples);
    EXPECT_GE(p.shape_alpha, 14.85);
    EXPECT_LE(p.shape_alpha, 15.15);
    EXPECT_GE(p.rate_beta, 388.0);
    EXPECT_LE(p.rate_beta, 396.0);
}

TEST(FitGammaMle, RecoversExponential) {
    const auto samples = oracle::gamma_samples(43, 1000000, 1.0, 1.0);
    const auto p = fit_gamma_mle(samples);
    EXPECT_GE(p.shape_alpha, 0.99);
    EXPECT_LE(p.shape_alpha, 1.01);
}

TEST(FitGammaMle, SampleMeanMatchesRateConvention) {
    const auto samples = oracle::gamma_samples(44, 1000000, 15.0, 392.0);
    double mean = 0;
    for (double x : samples)
        mean += x / samples.size();
    EXPECT_NEAR(mean / (15.0 / 392.0), 1.0, 0.01);
}

TEST(FitGammaMle, DegenerateInputs) {
    const std::vector<double> same(50, 0.02);
    EXPECT_THROW(fit_gamma_mle(same), DegenerateDataError);
    EXPECT_THROW(fit_gamma_mle(std::vector<double>{0.1, 0.0, 0.3}), DegenerateDataError);
    EXPECT_THROW(fit_gamma_mle(std::vector<double>{0.1, -1.0}), DegenerateDataError);
    EXPECT_THROW(fit_gamma_mle(std::vector<double>{0.1}), UsageError);
}

TEST(FitGammaMle, ScaleEquivariant) {
    const auto samples = oracle::gamma_samples(45, 20000, 3.0, 7.0);
    auto scaled = samples;
    for (auto& x : scaled)
        x *= 250.0;
    const auto a = fit_gamma_mle(samples);
    const auto b = fit_gamma_mle(scaled);
    EXPECT_NEAR(b.shape_alpha, a.shape_alpha, 1e-8);
    EXPECT_NEAR(b.rate_beta * 250.0 / a.rate_beta, 1.0, 1e-9);
}

TEST(FitGammaMle, LocalLikelihoodMaximum) {
    const auto samples = oracle::gamma_samples(46, 50000, 15.0, 392.0);
    const auto p = fit_gamma_mle(samples);
    const double best = gamma_log_likelihood(samples, p);
    for (double f : {0.99, 1.01}) {
        EXPECT_GE(best, gamma_log_likelihood(samples, GammaParams(p.shape_alpha * f, p.rate_beta)));
        EXPECT_GE(best, gamma_log_likelihood(samples, GammaParams(p.shape_alpha, p.rate_beta * f)));
    }
}

TEST(ThresholdJson, RoundTrip) {
    const GammaParams p(5.25, 341.75);
    const auto t = estimate_threshold(p, 0.05);
    const auto back = threshold_from_json(threshold_to_json(p, t, 3600));
    EXPECT_EQ(back.params.shape_alpha, p.shape_alpha);
    EXPECT_EQ(back.params.rate_beta, p.rate_beta);
    EXPECT_EQ(back.threshold.theta, t.theta);
    EXPECT_EQ(back.threshold.epsilon, 0.05);
    EXPECT_THROW(threshold_from_json("{\"alpha\": 1"), FormatError);
    EXPECT_THROW(threshold_from_json("{\"alpha\": 1}"), UsageError);
}
