// Minimal two-column CSV reading and writing used by the file formats.
#pragma once

#include <sentinel/error.hpp>

#include <charconv>
#include <cstdlib>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sentinel {

// Shortest text that reads back to the same double (at most 17 digits).
inline std::string format_real(double v) {
    char buf[32];
    for (int precision = 15; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof buf, "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v)
            break;
    }
    return buf;
}

// Always 17 significant digits.
inline std::string format_real17(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct CsvRow {
    std::string first;
    std::string second;
    std::size_t offset; // byte offset of the row start
};

// Parses "a,b" rows after checking the header. Blank trailing line allowed.
inline std::vector<CsvRow> parse_two_column_csv(std::string_view text, std::string_view header) {
    std::vector<CsvRow> rows;
    std::size_t pos = 0;
    bool saw_header = false;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos)
            end = text.size();
        std::string_view line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r')
            line.remove_suffix(1);
        if (!saw_header) {
            if (line != header)
                throw FormatError("expected CSV header \"" + std::string(header) + "\"", pos);
            saw_header = true;
        } else if (!line.empty()) {
            const auto comma = line.find(',');
            if (comma == std::string_view::npos || line.find(',', comma + 1) != std::string_view::npos)
                throw FormatError("expected exactly two CSV fields", pos);
            rows.push_back({std::string(line.substr(0, comma)), std::string(line.substr(comma + 1)), pos});
        }
        pos = end + 1;
    }
    if (!saw_header)
        throw FormatError("empty CSV file", 0);
    return rows;
}

inline long long parse_integer_field(const std::string& field, std::size_t offset) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw FormatError("invalid integer \"" + field + "\"", offset);
    return v;
}

inline double parse_real_field(const std::string& field, std::size_t offset) {
    if (field.empty())
        throw FormatError("empty numeric field", offset);
    char* end = nullptr;
    const double v = std::strtod(field.c_str(), &end);
    if (end != field.c_str() + field.size())
        throw FormatError("invalid number \"" + field + "\"", offset);
    return v;
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw UsageError("cannot open file for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw UsageError("cannot open file for writing: " + path);
    out << text;
    if (!out)
        throw UsageError("write failed: " + path);
}

} // namespace sentinel
