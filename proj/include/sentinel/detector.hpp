// Online misbehaviour predictor: threshold comparison with an alarm cooldown.
#pragma once

#include <sentinel/csv.hpp>
#include <sentinel/error.hpp>
#include <sentinel/error_series.hpp>
#include <sentinel/smoothing.hpp>

#include <json.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace sentinel {

struct DetectorConfig {
    double theta = 0.0;
    std::size_t healing_frames_h = 60;
    ArFilterConfig ar = ArFilterConfig::moving_average(10);

    void validate() const {
        if (!(theta > 0.0))
            throw UsageError("detector threshold must be positive");
        if (healing_frames_h < 1)
            throw UsageError("healing period must be at least one frame");
        ar.validate();
    }
};

enum class Decision { Quiet, Alarm, Suppressed };

inline std::string to_string(Decision d) {
    switch (d) {
    case Decision::Quiet:
        return "quiet";
    case Decision::Alarm:
        return "alarm";
    case Decision::Suppressed:
        return "suppressed";
    }
    return "?";
}

struct DetectorState {
    std::uint64_t frames_seen = 0;
    std::uint64_t cooldown_remaining = 0;
    std::vector<std::int64_t> alarms;

    friend bool operator==(const DetectorState&, const DetectorState&) = default;
};

/// Advances the detector by one smoothed error. The frame index recorded for
/// an alarm is first_frame + frames_seen.
///
/// While a cooldown is running it is decremented and exceedances are reported
/// as Suppressed. Otherwise error >= theta raises an Alarm and restarts the
/// cooldown at h frames.
inline std::pair<DetectorState, Decision> detector_step(DetectorState state, double smoothed_error,
                                                        const DetectorConfig& cfg,
                                                        std::int64_t first_frame = 0) {
    const bool exceeds = smoothed_error >= cfg.theta;
    const auto index = first_frame + static_cast<std::int64_t>(state.frames_seen);
    ++state.frames_seen;
    if (state.cooldown_remaining > 0) {
        --state.cooldown_remaining;
        return {std::move(state), exceeds ? Decision::Suppressed : Decision::Quiet};
    }
    if (!exceeds)
        return {std::move(state), Decision::Quiet};
    state.alarms.push_back(index);
    state.cooldown_remaining = cfg.healing_frames_h;
    return {std::move(state), Decision::Alarm};
}

struct DetectorRun {
    std::vector<std::int64_t> alarms;
    std::vector<Decision> decisions;
};

/// Folds detector_step over an already smoothed series.
inline DetectorRun run_detector_with_decisions(const ErrorSeries& smoothed, const DetectorConfig& cfg) {
    DetectorRun run;
    DetectorState state;
    run.decisions.reserve(smoothed.size());
    for (double e : smoothed.values) {
        auto [next, decision] = detector_step(std::move(state), e, cfg, smoothed.start_index);
        state = std::move(next);
        run.decisions.push_back(decision);
    }
    run.alarms = std::move(state.alarms);
    return run;
}

inline std::vector<std::int64_t> run_detector(const ErrorSeries& smoothed, const DetectorConfig& cfg) {
    return run_detector_with_decisions(smoothed, cfg).alarms;
}

inline std::string alarm_log_to_csv(const ErrorSeries& smoothed, const std::vector<Decision>& decisions) {
    std::string out = "frame_index,decision\n";
    for (std::size_t i = 0; i < decisions.size(); ++i)
        out += std::to_string(smoothed.frame_index(i)) + "," + to_string(decisions[i]) + "\n";
    return out;
}

/// Alarm frame indices from an alarm log CSV.
inline std::vector<std::int64_t> alarms_from_csv(std::string_view text) {
    std::vector<std::int64_t> alarms;
    for (const auto& row : parse_two_column_csv(text, "frame_index,decision")) {
        const auto index = parse_integer_field(row.first, row.offset);
        if (row.second == "alarm")
            alarms.push_back(index);
        else if (row.second != "quiet" && row.second != "suppressed")
            throw FormatError("unknown decision \"" + row.second + "\"", row.offset);
    }
    return alarms;
}

inline nlohmann::json state_to_json(const DetectorState& s) {
    return {{"frames_seen", s.frames_seen}, {"cooldown_remaining", s.cooldown_remaining}, {"alarms", s.alarms}};
}

inline DetectorState state_from_json(const nlohmann::json& j) {
    try {
        DetectorState s;
        s.frames_seen = j.at("frames_seen").get<std::uint64_t>();
        s.cooldown_remaining = j.at("cooldown_remaining").get<std::uint64_t>();
        s.alarms = j.at("alarms").get<std::vector<std::int64_t>>();
        return s;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("detector state JSON: ") + e.what());
    }
}

} // namespace sentinel
