// Time-indexed reconstruction errors.
#pragma once

#include <sentinel/csv.hpp>
#include <sentinel/error.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace sentinel {

/// Non-negative errors; values[i] belongs to frame start_index + i.
struct ErrorSeries {
    std::vector<double> values;
    std::int64_t start_index = 0;

    std::size_t size() const noexcept { return values.size(); }
    bool empty() const noexcept { return values.empty(); }
    std::int64_t frame_index(std::size_t i) const noexcept {
        return start_index + static_cast<std::int64_t>(i);
    }

    void validate() const {
        for (double v : values)
            if (!(v >= 0.0))
                throw UsageError("error series values must be non-negative");
    }
};

inline std::string error_series_to_csv(const ErrorSeries& series) {
    std::string out = "frame_index,error\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += std::to_string(series.frame_index(i));
        out += ',';
        out += format_real(series.values[i]);
        out += '\n';
    }
    return out;
}

// Rows must have consecutive frame indices.
inline ErrorSeries error_series_from_csv(std::string_view text) {
    const auto rows = parse_two_column_csv(text, "frame_index,error");
    ErrorSeries series;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto index = parse_integer_field(rows[i].first, rows[i].offset);
        if (i == 0)
            series.start_index = index;
        else if (index != series.start_index + static_cast<std::int64_t>(i))
            throw FormatError("frame indices must be consecutive", rows[i].offset);
        const double v = parse_real_field(rows[i].second, rows[i].offset);
        if (!(v >= 0.0))
            throw FormatError("negative reconstruction error", rows[i].offset);
        series.values.push_back(v);
    }
    return series;
}

} // namespace sentinel
