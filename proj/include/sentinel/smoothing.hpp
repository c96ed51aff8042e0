// Autoregressive smoothing of reconstruction-error series.
#pragma once

#include <sentinel/error.hpp>
#include <sentinel/error_series.hpp>

#include <cstddef>
#include <vector>

namespace sentinel {

/// output[t] = intercept + sum_i coefficients[i] * raw[t - i], i = 0..k-1,
/// so coefficients[0] weights the current value.
struct ArFilterConfig {
    std::size_t order_k = 10;
    std::vector<double> coefficients = std::vector<double>(10, 0.1);
    double intercept = 0.0;

    /// Trailing moving average: intercept 0, every coefficient 1/k.
    static ArFilterConfig moving_average(std::size_t k) {
        if (k < 1)
            throw UsageError("AR filter order must be at least 1");
        return ArFilterConfig{k, std::vector<double>(k, 1.0 / static_cast<double>(k)), 0.0};
    }

    void validate() const {
        if (order_k < 1)
            throw UsageError("AR filter order must be at least 1");
        if (coefficients.size() != order_k)
            throw UsageError("AR filter needs exactly order_k coefficients");
    }

    double coefficient_sum() const {
        double s = 0.0;
        for (double c : coefficients)
            s += c;
        return s;
    }
};

/// Streaming form; keeps the last k values in a ring buffer. Before k values
/// have arrived, the available values are averaged with uniform weights
/// (scaled by the coefficient sum, which is 1 for the moving average).
class ArFilter {
  public:
    explicit ArFilter(ArFilterConfig cfg) : cfg_(std::move(cfg)), ring_(cfg_.order_k, 0.0) {
        cfg_.validate();
        coefficient_sum_ = cfg_.coefficient_sum();
    }

    double push(double value) {
        ring_[head_] = value;
        head_ = (head_ + 1) % ring_.size();
        if (count_ < ring_.size())
            ++count_;
        if (count_ < ring_.size()) {
            double sum = 0.0;
            for (std::size_t i = 0; i < count_; ++i)
                sum += ring_[i];
            return cfg_.intercept + coefficient_sum_ * (sum / static_cast<double>(count_));
        }
        double out = cfg_.intercept;
        // Newest value sits just before head_.
        std::size_t pos = head_;
        for (std::size_t i = 0; i < ring_.size(); ++i) {
            pos = pos == 0 ? ring_.size() - 1 : pos - 1;
            out += cfg_.coefficients[i] * ring_[pos];
        }
        return out;
    }

    std::size_t seen() const noexcept { return count_; }
    const ArFilterConfig& config() const noexcept { return cfg_; }

  private:
    ArFilterConfig cfg_;
    std::vector<double> ring_;
    std::size_t head_ = 0;
    std::size_t count_ = 0;
    double coefficient_sum_ = 1.0;
};

inline ErrorSeries ar_filter(const ErrorSeries& raw, const ArFilterConfig& cfg) {
    if (raw.empty())
        throw UsageError("ar_filter: empty series");
    ArFilter filter(cfg);
    ErrorSeries out;
    out.start_index = raw.start_index;
    out.values.reserve(raw.size());
    for (double v : raw.values)
        out.values.push_back(filter.push(v));
    return out;
}

} // namespace sentinel
