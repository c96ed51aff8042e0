// Synthetic driving scenarios: a procedural road camera, gradually injected
// visual conditions and a toy lane-keeping vehicle that records
// out-of-lane misbehaviours.
#pragma once

#include <sentinel/csv.hpp>
#include <sentinel/error.hpp>
#include <sentinel/frame.hpp>
#include <sentinel/misbehaviour.hpp>
#include <sentinel/random.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

namespace sentinel {

enum class Condition { Nominal, DayNightCycle, Rain, Snow, Fog };

inline std::string to_string(Condition c) {
    switch (c) {
    case Condition::Nominal:
        return "nominal";
    case Condition::DayNightCycle:
        return "daynight";
    case Condition::Rain:
        return "rain";
    case Condition::Snow:
        return "snow";
    case Condition::Fog:
        return "fog";
    }
    return "?";
}

inline Condition condition_from_string(const std::string& s) {
    for (auto c : {Condition::Nominal, Condition::DayNightCycle, Condition::Rain, Condition::Snow, Condition::Fog})
        if (to_string(c) == s)
            return c;
    throw UsageError("unknown condition \"" + s + "\"");
}

struct ConditionSetting {
    Condition condition = Condition::Nominal;
    double intensity_max = 1.0;

    friend bool operator==(const ConditionSetting&, const ConditionSetting&) = default;
};

/// Constants of the renderer and the vehicle model.
struct ScenarioTuning {
    double grain_noise = 0.12;        // per-pixel camera grain at unit grain level
    std::size_t grain_dof = 8;        // grain variance ~ chi-square(dof) / dof
    double grain_correlation = 0.99;  // frame-to-frame correlation of the grain level
    double vehicle_persistence = 0.9; // AR(1) coefficient of the lateral offset
    double vehicle_noise = 0.02;     // offset noise under nominal conditions
    double vehicle_noise_gain = 0.25; // extra offset noise at full intensity
    double lane_half_width = 1.0;    // misbehaviour when |offset| exceeds this

    friend bool operator==(const ScenarioTuning&, const ScenarioTuning&) = default;
};

struct ScenarioSpec {
    std::uint64_t track_seed = 1;
    std::size_t n_frames = 600;
    double frame_rate_hz = 10.0;
    std::vector<ConditionSetting> conditions{{Condition::Nominal, 0.0}};
    double cycle_period_s = 60.0;
    std::uint32_t width = 32;
    std::uint32_t height = 32;
    std::uint32_t channels = 1;
    ScenarioTuning tuning;

    bool nominal() const {
        return std::all_of(conditions.begin(), conditions.end(),
                           [](const auto& c) { return c.condition == Condition::Nominal; });
    }

    double intensity_max(Condition c) const {
        for (const auto& s : conditions)
            if (s.condition == c)
                return s.intensity_max;
        return 0.0;
    }

    void validate() const {
        if (n_frames == 0)
            throw UsageError("scenario: n_frames must be positive");
        if (!(frame_rate_hz > 0.0))
            throw UsageError("scenario: frame rate must be positive");
        if (!(cycle_period_s > 0.0))
            throw UsageError("scenario: cycle period must be positive");
        if (width == 0 || height < 4 || channels == 0)
            throw UsageError("scenario: frame must be at least 1x4x1");
        bool has_nominal = false;
        bool has_other = false;
        for (const auto& c : conditions) {
            if (!(c.intensity_max >= 0.0 && c.intensity_max <= 1.0))
                throw UsageError("scenario: intensity_max must lie in [0, 1]");
            (c.condition == Condition::Nominal ? has_nominal : has_other) = true;
        }
        if (has_nominal && has_other)
            throw UsageError("scenario: nominal excludes every other condition");
    }

    friend bool operator==(const ScenarioSpec&, const ScenarioSpec&) = default;
};

/// Raised-cosine ramp of one condition: max * (1 - cos(2 pi t / period)) / 2
/// with the period in frames.
inline double condition_intensity(std::int64_t t_frames, const ScenarioSpec& spec, Condition c) {
    if (c == Condition::Nominal)
        return 0.0;
    const double period = spec.cycle_period_s * spec.frame_rate_hz;
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(t_frames) / period;
    return spec.intensity_max(c) * (1.0 - std::cos(phase)) / 2.0;
}

/// Combined intensity of all active conditions, 1 - prod(1 - i_c); equals the
/// single condition's intensity when only one is active.
inline double condition_intensity(std::int64_t t_frames, const ScenarioSpec& spec) {
    double clear = 1.0;
    for (const auto& s : spec.conditions)
        clear *= 1.0 - condition_intensity(t_frames, spec, s.condition);
    return std::clamp(1.0 - clear, 0.0, 1.0);
}

struct Scenario {
    FrameStream frames;
    MisbehaviourLog misbehaviours;
    std::vector<double> intensity;
};

namespace detail {

// Smooth road geometry driven by a damped second-order random walk.
struct RoadState {
    double curvature = 0.0;
    double curvature_rate = 0.0;

    void advance(Rng& rng) {
        curvature_rate = 0.96 * curvature_rate - 0.004 * curvature + 0.006 * rng.normal();
        curvature += curvature_rate;
    }
};

// Slowly varying grain level with mean 1: the mean square of `dof`
// unit-variance AR(1) processes.
struct GrainState {
    std::vector<double> components;
    double correlation = 0.95;

    GrainState(std::size_t dof, double corr, Rng& rng) : components(dof), correlation(corr) {
        for (auto& c : components)
            c = rng.normal();
    }

    double level() const {
        double sum = 0.0;
        for (double c : components)
            sum += c * c;
        return components.empty() ? 1.0 : sum / static_cast<double>(components.size());
    }

    void advance(Rng& rng) {
        const double innovation = std::sqrt(1.0 - correlation * correlation);
        for (auto& c : components)
            c = correlation * c + innovation * rng.normal();
    }
};

inline void render_frame(FrameTensor& frame, const ScenarioSpec& spec, double curvature, double offset,
                         double grain, std::int64_t t, Rng& noise) {
    const auto w = frame.width();
    const auto h = frame.height();
    const auto ch = frame.channels();
    const std::uint32_t horizon = h / 4;
    const double day_night = condition_intensity(t, spec, Condition::DayNightCycle);
    const double rain = condition_intensity(t, spec, Condition::Rain);
    const double snow = condition_intensity(t, spec, Condition::Snow);
    const double fog = condition_intensity(t, spec, Condition::Fog);

    std::vector<double> img(static_cast<std::size_t>(w) * h * ch);
    auto px = [&](std::uint32_t x, std::uint32_t y, std::uint32_t c) -> double& {
        return img[(static_cast<std::size_t>(y) * w + x) * ch + c];
    };

    for (std::uint32_t y = 0; y < h; ++y) {
        const bool sky = y < horizon;
        // depth: 0 at the horizon, 1 at the bottom row.
        const double depth = sky ? 0.0 : static_cast<double>(y - horizon) / static_cast<double>(h - 1 - horizon);
        const double far = 1.0 - depth;
        const double half_road = (0.08 + 0.30 * depth) * w;
        const double center = 0.5 * w - offset * half_road * 0.8 + curvature * far * far * 0.35 * w;
        const double band = 0.6 + 1.2 * depth;
        for (std::uint32_t x = 0; x < w; ++x) {
            const double xc = static_cast<double>(x) + 0.5;
            double v;
            if (sky) {
                v = 0.55 + 0.15 * static_cast<double>(y) / horizon;
            } else {
                const double from_center = std::abs(xc - center);
                v = from_center < half_road ? 0.32 : 0.12 + 0.04 * depth;
                v += 0.6 * std::max(0.0, 1.0 - from_center / band);
            }
            for (std::uint32_t c = 0; c < ch; ++c)
                px(x, y, c) = ch == 1 ? v : v * (0.85 + 0.1 * c);
        }
    }

    if (fog > 0.0) {
        const std::uint32_t block = 4;
        const std::uint32_t bw = (w + block - 1) / block;
        const std::uint32_t bh = (h + block - 1) / block;
        std::vector<double> haze(static_cast<std::size_t>(bw) * bh);
        for (auto& v : haze)
            v = 0.08 * fog * noise.normal();
        for (std::uint32_t y = 0; y < h; ++y)
            for (std::uint32_t x = 0; x < w; ++x)
                for (std::uint32_t c = 0; c < ch; ++c) {
                    auto& v = px(x, y, c);
                    v = (1.0 - 0.75 * fog) * v + 0.75 * fog * 0.7 + haze[(y / block) * bw + x / block];
                }
    }
    if (day_night > 0.0)
        for (auto& v : img)
            v *= 1.0 - 0.8 * day_night;
    if (rain > 0.0) {
        for (auto& v : img)
            v += 0.3 * rain * noise.normal();
        const auto streaks = static_cast<std::size_t>(std::lround(0.02 * rain * w * h));
        for (std::size_t s = 0; s < streaks; ++s) {
            const auto x = static_cast<std::uint32_t>(noise.below(w));
            const auto y0 = static_cast<std::uint32_t>(noise.below(h));
            for (std::uint32_t y = y0; y < std::min(h, y0 + 4); ++y)
                for (std::uint32_t c = 0; c < ch; ++c)
                    px(x, y, c) += 0.35 * rain;
        }
    }
    if (snow > 0.0) {
        for (auto& v : img) {
            v += 0.05 * snow * noise.normal();
            if (noise.uniform() < 0.1 * snow)
                v = 0.95;
        }
    }
    for (std::size_t i = 0; i < img.size(); ++i)
        frame.set_flat(i, img[i] + grain * noise.normal());
}

} // namespace detail

/// Deterministic in spec (including track_seed).
inline Scenario generate_scenario(const ScenarioSpec& spec) {
    spec.validate();
    Rng road_rng(derive_seed(spec.track_seed, 1));
    Rng vehicle_rng(derive_seed(spec.track_seed, 2));
    Rng noise_rng(derive_seed(spec.track_seed, 3));
    Rng grain_rng(derive_seed(spec.track_seed, 4));

    Scenario out;
    out.frames = FrameStream(spec.frame_rate_hz);
    out.misbehaviours.flags.assign(spec.n_frames, false);
    out.intensity.reserve(spec.n_frames);

    detail::RoadState road;
    // Start from a settled road rather than a straight one.
    for (int i = 0; i < 200; ++i)
        road.advance(road_rng);
    double offset = 0.0;
    const auto& tune = spec.tuning;
    detail::GrainState grain(tune.grain_dof, tune.grain_correlation, grain_rng);
    for (std::size_t t = 0; t < spec.n_frames; ++t) {
        const auto ti = static_cast<std::int64_t>(t);
        const double intensity = condition_intensity(ti, spec);
        out.intensity.push_back(intensity);

        FrameTensor frame(spec.width, spec.height, spec.channels);
        detail::render_frame(frame, spec, road.curvature, offset, tune.grain_noise * std::sqrt(grain.level()), ti,
                             noise_rng);
        out.frames.push_back(std::move(frame));

        const double sigma = tune.vehicle_noise + tune.vehicle_noise_gain * intensity * intensity * intensity;
        offset = tune.vehicle_persistence * offset + sigma * vehicle_rng.normal();
        if (std::abs(offset) > tune.lane_half_width) {
            out.misbehaviours.flags[t] = true;
            offset = 0.0; // restart at the lane centre
        }
        road.advance(road_rng);
        grain.advance(grain_rng);
    }
    return out;
}

inline std::string intensity_to_csv(const std::vector<double>& intensity) {
    std::string out = "frame_index,intensity\n";
    for (std::size_t t = 0; t < intensity.size(); ++t)
        out += std::to_string(t) + "," + format_real(intensity[t]) + "\n";
    return out;
}

inline nlohmann::json scenario_to_json(const ScenarioSpec& s) {
    auto conds = nlohmann::json::array();
    for (const auto& c : s.conditions)
        conds.push_back({{"condition", to_string(c.condition)}, {"intensity_max", c.intensity_max}});
    return {{"track_seed", s.track_seed},
            {"n_frames", s.n_frames},
            {"frame_rate_hz", s.frame_rate_hz},
            {"conditions", conds},
            {"cycle_period_s", s.cycle_period_s},
            {"width", s.width},
            {"height", s.height},
            {"channels", s.channels}};
}

/// Missing keys keep their defaults.
inline ScenarioSpec scenario_from_json(const nlohmann::json& j, ScenarioSpec base = {}) {
    try {
        if (j.contains("track_seed"))
            base.track_seed = j.at("track_seed").get<std::uint64_t>();
        if (j.contains("n_frames"))
            base.n_frames = j.at("n_frames").get<std::size_t>();
        if (j.contains("frame_rate_hz"))
            base.frame_rate_hz = j.at("frame_rate_hz").get<double>();
        if (j.contains("cycle_period_s"))
            base.cycle_period_s = j.at("cycle_period_s").get<double>();
        if (j.contains("width"))
            base.width = j.at("width").get<std::uint32_t>();
        if (j.contains("height"))
            base.height = j.at("height").get<std::uint32_t>();
        if (j.contains("channels"))
            base.channels = j.at("channels").get<std::uint32_t>();
        if (j.contains("conditions")) {
            base.conditions.clear();
            for (const auto& c : j.at("conditions")) {
                if (c.is_string()) {
                    const auto cond = condition_from_string(c.get<std::string>());
                    base.conditions.push_back({cond, cond == Condition::Nominal ? 0.0 : 1.0});
                } else {
                    const auto cond = condition_from_string(c.at("condition").get<std::string>());
                    base.conditions.push_back({cond, c.value("intensity_max", cond == Condition::Nominal ? 0.0 : 1.0)});
                }
            }
            if (base.conditions.empty())
                base.conditions.push_back({Condition::Nominal, 0.0});
        }
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("scenario config: ") + e.what());
    }
    base.validate();
    return base;
}

} // namespace sentinel
