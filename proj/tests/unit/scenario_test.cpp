#include <sentinel/reconstruct.hpp>
#include <sentinel/scenario.hpp>

#include <gtest/gtest.h>

#include <algorithm>

using namespace sentinel;

namespace {

ScenarioSpec spec_with(std::uint64_t seed, std::size_t n, std::vector<ConditionSetting> conditions) {
    ScenarioSpec s;
    s.track_seed = seed;
    s.n_frames = n;
    s.conditions = std::move(conditions);
    return s;
}

double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    return v[static_cast<std::size_t>(q * static_cast<double>(v.size() - 1))];
}

} // namespace

TEST(ConditionIntensity, RaisedCosineWaveform) {
    const auto spec = spec_with(1, 600, {{Condition::DayNightCycle, 1.0}});
    EXPECT_EQ(condition_intensity(0, spec), 0.0);
    EXPECT_NEAR(condition_intensity(300, spec), 1.0, 1e-12);
    EXPECT_NEAR(condition_intensity(150, spec), 0.5, 1e-12);
    const auto weaker = spec_with(1, 600, {{Condition::Fog, 0.4}});
    EXPECT_NEAR(condition_intensity(300, weaker), 0.4, 1e-12);
    EXPECT_EQ(condition_intensity(300, spec_with(1, 600, {{Condition::Nominal, 0.0}})), 0.0);
}

TEST(ConditionIntensity, CombinesAsIndependentHazards) {
    const auto spec = spec_with(1, 600, {{Condition::Rain, 0.5}, {Condition::Snow, 0.5}});
    EXPECT_NEAR(condition_intensity(300, spec), 0.75, 1e-12);
}

TEST(GenerateScenario, NominalHasNoMisbehaviourAndZeroIntensity) {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const auto sc = generate_scenario(spec_with(seed, 1200, {{Condition::Nominal, 0.0}}));
        EXPECT_EQ(sc.misbehaviours.count(), 0u) << "seed " << seed;
        EXPECT_TRUE(std::all_of(sc.intensity.begin(), sc.intensity.end(), [](double i) { return i == 0.0; }));
        EXPECT_EQ(sc.misbehaviours.size(), 1200u);
    }
}

TEST(GenerateScenario, DayNightTracePeriodAndPeak) {
    const auto sc = generate_scenario(spec_with(3, 1500, {{Condition::DayNightCycle, 1.0}}));
    const auto peak = std::max_element(sc.intensity.begin(), sc.intensity.end());
    EXPECT_NEAR(*peak, 1.0, 1e-9);
    EXPECT_EQ(peak - sc.intensity.begin(), 300);
    for (std::size_t t = 0; t + 600 < sc.intensity.size(); ++t)
        EXPECT_NEAR(sc.intensity[t], sc.intensity[t + 600], 1e-9);
}

TEST(GenerateScenario, DeterministicPerSeed) {
    const auto spec = spec_with(42, 300, {{Condition::Fog, 1.0}, {Condition::Snow, 0.7}});
    const auto a = generate_scenario(spec);
    const auto b = generate_scenario(spec);
    EXPECT_EQ(encode_frames(a.frames), encode_frames(b.frames));
    EXPECT_EQ(a.misbehaviours, b.misbehaviours);
    EXPECT_EQ(a.intensity, b.intensity);
    auto other = spec;
    other.track_seed = 43;
    EXPECT_NE(encode_frames(generate_scenario(other).frames), encode_frames(a.frames));
}

TEST(GenerateScenario, PixelsInRangeAndShapesUniform) {
    for (auto cond : {Condition::Nominal, Condition::DayNightCycle, Condition::Rain, Condition::Snow, Condition::Fog}) {
        auto spec = spec_with(5, 400, {{cond, cond == Condition::Nominal ? 0.0 : 1.0}});
        spec.width = 24;
        spec.height = 16;
        spec.channels = 3;
        const auto sc = generate_scenario(spec);
        for (const auto& f : sc.frames) {
            EXPECT_EQ(f.width(), 24u);
            EXPECT_EQ(f.height(), 16u);
            EXPECT_EQ(f.channels(), 3u);
            for (float p : f.pixels())
                ASSERT_TRUE(p >= 0.0f && p <= 1.0f);
        }
    }
}

TEST(GenerateScenario, MisbehaviourRateGrowsWithIntensity) {
    std::size_t counts[3] = {0, 0, 0};
    const double levels[3] = {0.0, 0.3, 1.0};
    for (int l = 0; l < 3; ++l)
        for (std::uint64_t seed = 0; seed < 20; ++seed)
            counts[l] += generate_scenario(spec_with(700 + seed, 1200,
                                                     {{Condition::DayNightCycle, levels[l]},
                                                      {Condition::Rain, levels[l]}}))
                             .misbehaviours.count();
    EXPECT_LE(counts[0], counts[1]);
    EXPECT_LE(counts[1], counts[2]);
    EXPECT_GT(counts[2], 0u);
}

TEST(GenerateScenario, NominalAndStressedErrorsSeparate) {
    FrameStream train;
    for (std::uint64_t s = 0; s < 3; ++s)
        for (const auto& f : generate_scenario(spec_with(100 + s, 1000, {{Condition::Nominal, 0.0}})).frames)
            train.push_back(f);
    TrainingOptions opt;
    opt.track_loss = false;
    const auto model = train_reconstructor(train, ReconstructorKind::SAE, opt);

    std::vector<double> nominal, stressed;
    for (std::uint64_t s = 0; s < 3; ++s) {
        const auto n = error_series(model, generate_scenario(spec_with(900 + s, 600, {{Condition::Nominal, 0.0}})).frames);
        nominal.insert(nominal.end(), n.values.begin(), n.values.end());
    }
    for (auto cond : {Condition::DayNightCycle, Condition::Rain, Condition::Snow, Condition::Fog}) {
        auto spec = spec_with(950, 600, {{cond, 1.0}});
        const auto e = error_series(model, generate_scenario(spec).frames);
        EXPECT_LT(quantile(nominal, 0.99), quantile(e.values, 0.5)) << to_string(cond);
    }
}

TEST(ScenarioSpec, ValidationAndJson) {
    EXPECT_THROW(generate_scenario(spec_with(1, 10, {{Condition::Nominal, 0.0}, {Condition::Rain, 1.0}})),
                 UsageError);
    auto bad = spec_with(1, 10, {{Condition::Rain, 1.0}});
    bad.cycle_period_s = 0.0;
    EXPECT_THROW(bad.validate(), UsageError);
    EXPECT_THROW(spec_with(1, 10, {{Condition::Rain, 1.5}}).validate(), UsageError);

    const auto spec = spec_with(9, 77, {{Condition::Fog, 0.25}, {Condition::DayNightCycle, 1.0}});
    EXPECT_EQ(scenario_from_json(scenario_to_json(spec)), spec);
    const auto parsed = scenario_from_json(nlohmann::json::parse(R"({"conditions": ["rain", "snow"]})"));
    EXPECT_EQ(parsed.conditions.size(), 2u);
    EXPECT_EQ(parsed.intensity_max(Condition::Snow), 1.0);
    EXPECT_THROW(scenario_from_json(nlohmann::json::parse(R"({"conditions": ["hail"]})")), UsageError);
}
