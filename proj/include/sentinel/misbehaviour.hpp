// Per-frame ground-truth misbehaviour flags.
#pragma once

#include <sentinel/csv.hpp>
#include <sentinel/error.hpp>

#include <cstddef>
#include <string>
#include <vector>

namespace sentinel {

struct MisbehaviourLog {
    std::vector<bool> flags; // flags[j]: misbehaviour recorded at frame j

    std::size_t size() const noexcept { return flags.size(); }

    std::size_t count() const noexcept {
        std::size_t n = 0;
        for (bool f : flags)
            n += f ? 1 : 0;
        return n;
    }

    std::vector<std::size_t> frames() const {
        std::vector<std::size_t> out;
        for (std::size_t j = 0; j < flags.size(); ++j)
            if (flags[j])
                out.push_back(j);
        return out;
    }

    static MisbehaviourLog at_frames(std::size_t n, const std::vector<std::size_t>& frames) {
        MisbehaviourLog log{std::vector<bool>(n, false)};
        for (auto f : frames) {
            if (f >= n)
                throw UsageError("misbehaviour frame out of range");
            log.flags[f] = true;
        }
        return log;
    }

    friend bool operator==(const MisbehaviourLog&, const MisbehaviourLog&) = default;
};

inline std::string misbehaviour_to_csv(const MisbehaviourLog& log) {
    std::string out = "frame_index,misbehaviour\n";
    for (std::size_t j = 0; j < log.size(); ++j)
        out += std::to_string(j) + (log.flags[j] ? ",1\n" : ",0\n");
    return out;
}

inline MisbehaviourLog misbehaviour_from_csv(std::string_view text) {
    MisbehaviourLog log;
    const auto rows = parse_two_column_csv(text, "frame_index,misbehaviour");
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (parse_integer_field(rows[i].first, rows[i].offset) != static_cast<long long>(i))
            throw FormatError("misbehaviour rows must be numbered 0, 1, 2, ...", rows[i].offset);
        if (rows[i].second != "0" && rows[i].second != "1")
            throw FormatError("misbehaviour flag must be 0 or 1", rows[i].offset);
        log.flags.push_back(rows[i].second == "1");
    }
    return log;
}

} // namespace sentinel
