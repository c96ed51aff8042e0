// Command implementations behind the `sentinel` tool: one JSON config with a
// section per command, command-line overrides on top.
//
// Exit codes: 0 success, 2 usage/config/format error, 3 numerical error.
#pragma once

#include <sentinel/detector.hpp>
#include <sentinel/error.hpp>
#include <sentinel/error_series.hpp>
#include <sentinel/evalkit.hpp>
#include <sentinel/frame.hpp>
#include <sentinel/gammafit.hpp>
#include <sentinel/misbehaviour.hpp>
#include <sentinel/reconstruct.hpp>
#include <sentinel/scenario.hpp>
#include <sentinel/smoothing.hpp>

#include <json.hpp>

#include <algorithm>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace sentinel {

/// Values given on the command line; set fields win over the config file.
struct Overrides {
    std::optional<std::uint64_t> seed;
    std::optional<double> epsilon;
    std::optional<std::size_t> ar_k;
    std::optional<std::vector<std::size_t>> reaction_r;
    std::optional<std::vector<double>> thresholds;
};

struct SimulateRun {
    ScenarioSpec scenario;
    std::string frames;
    std::string misbehaviour;
    std::string intensity;
};

struct PipelineConfig {
    std::uint64_t seed = 1;
    std::vector<SimulateRun> simulate;

    std::vector<std::string> train_frames;
    std::string model;
    ReconstructorKind kind = ReconstructorKind::SAE;
    TrainingOptions training;

    std::vector<std::string> fit_frames;
    std::string params;
    std::string fit_errors; // optional CSV of the calibration errors
    double epsilon = 0.05;

    ArFilterConfig ar = ArFilterConfig::moving_average(10);
    std::size_t detector_h = 60;
    bool detect_raw = false; // threshold raw instead of smoothed errors

    std::string detect_frames;
    std::string alarms;
    std::string detect_errors;
    std::string detect_state;

    LabellingConfig labelling;
    std::string label_misbehaviour;
    std::string labels;

    std::vector<std::string> eval_frames;
    std::vector<std::string> eval_misbehaviour;
    std::string report;
    std::string roc;
    std::string pr;
    std::vector<double> thresholds; // empty: derived from the fitted model and the data
    std::vector<std::size_t> reaction_sweep;

    void validate() const {
        if (!(epsilon > 0.0 && epsilon < 1.0))
            throw UsageError("epsilon must lie in (0, 1)");
        if (detector_h < 1)
            throw UsageError("detector healing period must be at least one frame");
        ar.validate();
        labelling.validate();
        for (auto r : reaction_sweep)
            if (r < 1)
                throw UsageError("reaction periods must be at least one frame");
        if (eval_frames.size() != eval_misbehaviour.size())
            throw UsageError("eval needs one misbehaviour log per frame file");
    }
};

namespace detail {

inline std::string resolve(const std::filesystem::path& base, const std::string& p) {
    if (p.empty())
        return p;
    const std::filesystem::path path(p);
    return path.is_absolute() ? p : (base / path).lexically_normal().string();
}

inline std::vector<std::string> path_list(const nlohmann::json& j, const std::filesystem::path& base) {
    std::vector<std::string> out;
    if (j.is_string())
        out.push_back(resolve(base, j.get<std::string>()));
    else
        for (const auto& item : j)
            out.push_back(resolve(base, item.get<std::string>()));
    return out;
}

template <typename T>
void read_if(const nlohmann::json& section, const char* key, T& target) {
    if (section.contains(key) && !section.at(key).is_null())
        target = section.at(key).get<T>();
}

inline void read_path(const nlohmann::json& section, const char* key, const std::filesystem::path& base,
                      std::string& target) {
    if (section.contains(key))
        target = resolve(base, section.at(key).get<std::string>());
}

} // namespace detail

/// Relative paths resolve against `base` (the config file's directory).
inline PipelineConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base,
                                       const Overrides& overrides = {}) {
    PipelineConfig cfg;
    const auto empty = nlohmann::json::object();
    auto section = [&](const char* name) -> const nlohmann::json& { return j.contains(name) ? j.at(name) : empty; };
    try {
        detail::read_if(j, "seed", cfg.seed);
        if (overrides.seed)
            cfg.seed = *overrides.seed;

        const auto& sim = section("simulate");
        if (sim.contains("runs")) {
            std::size_t index = 0;
            for (const auto& run : sim.at("runs")) {
                SimulateRun r;
                ScenarioSpec base_spec;
                base_spec.track_seed = cfg.seed + index;
                r.scenario = scenario_from_json(run.contains("scenario") ? run.at("scenario") : empty, base_spec);
                if (overrides.seed && run.contains("scenario") && run.at("scenario").contains("track_seed"))
                    r.scenario.track_seed = *overrides.seed + index;
                detail::read_path(run, "frames", base, r.frames);
                detail::read_path(run, "misbehaviour", base, r.misbehaviour);
                detail::read_path(run, "intensity", base, r.intensity);
                cfg.simulate.push_back(std::move(r));
                ++index;
            }
        }

        const auto& train = section("train");
        if (train.contains("frames"))
            cfg.train_frames = detail::path_list(train.at("frames"), base);
        detail::read_path(train, "model", base, cfg.model);
        if (train.contains("kind"))
            cfg.kind = reconstructor_kind_from_string(train.at("kind").get<std::string>());
        cfg.training.seed = cfg.seed;
        detail::read_if(train, "hidden_sizes", cfg.training.hidden_sizes);
        detail::read_if(train, "learning_rate", cfg.training.learning_rate);
        detail::read_if(train, "epochs", cfg.training.epochs);
        detail::read_if(train, "batch_size", cfg.training.batch_size);
        detail::read_if(train, "history_k", cfg.training.history_k);
        if (train.contains("activation"))
            cfg.training.activation = activation_from_string(train.at("activation").get<std::string>());
        if (train.contains("seed") && !overrides.seed)
            cfg.training.seed = train.at("seed").get<std::uint64_t>();

        const auto& fit = section("fit");
        if (fit.contains("frames"))
            cfg.fit_frames = detail::path_list(fit.at("frames"), base);
        detail::read_path(fit, "model", base, cfg.model);
        detail::read_path(fit, "params", base, cfg.params);
        detail::read_path(fit, "errors", base, cfg.fit_errors);
        detail::read_if(fit, "epsilon", cfg.epsilon);
        if (overrides.epsilon)
            cfg.epsilon = *overrides.epsilon;

        const auto& smoothing = section("smoothing");
        std::size_t ar_k = 10;
        detail::read_if(smoothing, "ar_k", ar_k);
        if (overrides.ar_k)
            ar_k = *overrides.ar_k;
        cfg.ar = ArFilterConfig::moving_average(ar_k);

        const auto& detect = section("detect");
        detail::read_if(detect, "healing_h", cfg.detector_h);
        detail::read_if(detect, "raw", cfg.detect_raw);
        detail::read_path(detect, "frames", base, cfg.detect_frames);
        detail::read_path(detect, "alarms", base, cfg.alarms);
        detail::read_path(detect, "errors", base, cfg.detect_errors);
        detail::read_path(detect, "state", base, cfg.detect_state);

        const auto& labelling = section("labelling");
        detail::read_if(labelling, "window_a", cfg.labelling.window_a);
        detail::read_if(labelling, "window_b", cfg.labelling.window_b);
        detail::read_if(labelling, "reaction_r", cfg.labelling.reaction_r);
        detail::read_if(labelling, "healing_h", cfg.labelling.healing_h);

        const auto& label = section("label");
        detail::read_path(label, "misbehaviour", base, cfg.label_misbehaviour);
        detail::read_path(label, "labels", base, cfg.labels);

        const auto& eval = section("eval");
        if (eval.contains("frames"))
            cfg.eval_frames = detail::path_list(eval.at("frames"), base);
        if (eval.contains("misbehaviour"))
            cfg.eval_misbehaviour = detail::path_list(eval.at("misbehaviour"), base);
        detail::read_path(eval, "report", base, cfg.report);
        detail::read_path(eval, "roc", base, cfg.roc);
        detail::read_path(eval, "pr", base, cfg.pr);
        detail::read_if(eval, "thresholds", cfg.thresholds);
        detail::read_if(eval, "reaction_sweep", cfg.reaction_sweep);
        if (overrides.thresholds)
            cfg.thresholds = *overrides.thresholds;
        if (overrides.reaction_r)
            cfg.reaction_sweep = *overrides.reaction_r;
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

inline PipelineConfig load_config(const std::string& path, const Overrides& overrides = {}) {
    const auto text = read_text_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("config JSON: ") + e.what(), e.byte);
    }
    return config_from_json(j, std::filesystem::path(path).parent_path(), overrides);
}

namespace detail {

inline void require(const std::string& value, const char* what) {
    if (value.empty())
        throw UsageError(std::string("config is missing ") + what);
}

inline void require_output_dir(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty() && !std::filesystem::is_directory(parent))
        throw UsageError("output directory does not exist: " + parent.string());
}

inline void write_output(const std::string& path, const std::string& text) {
    require_output_dir(path);
    write_text_file(path, text);
}

inline FrameStream load_frames_concat(const std::vector<std::string>& paths) {
    FrameStream all;
    for (const auto& p : paths)
        for (const auto& f : read_frames(p))
            all.push_back(f);
    return all;
}

inline ReconstructorModel load_model(const std::string& path) {
    const auto text = read_text_file(path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(std::string("model JSON: ") + e.what(), e.byte);
    }
    return model_from_json(j);
}

// Shortest round-trip text for every number.
inline std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

} // namespace detail

inline void cmd_simulate(const PipelineConfig& cfg, std::ostream& log = std::cout) {
    if (cfg.simulate.empty())
        throw UsageError("config has no simulate.runs");
    for (const auto& run : cfg.simulate) {
        detail::require(run.frames, "simulate.runs[].frames");
        detail::require_output_dir(run.frames);
        if (!run.misbehaviour.empty())
            detail::require_output_dir(run.misbehaviour);
        if (!run.intensity.empty())
            detail::require_output_dir(run.intensity);
    }
    for (const auto& run : cfg.simulate) {
        const auto scenario = generate_scenario(run.scenario);
        write_frames(run.frames, scenario.frames);
        if (!run.misbehaviour.empty())
            write_text_file(run.misbehaviour, misbehaviour_to_csv(scenario.misbehaviours));
        if (!run.intensity.empty())
            write_text_file(run.intensity, intensity_to_csv(scenario.intensity));
        log << "simulate: " << run.frames << " (" << scenario.frames.size() << " frames, "
            << scenario.misbehaviours.count() << " misbehaviours)\n";
    }
}

inline void cmd_train(const PipelineConfig& cfg, std::ostream& log = std::cout) {
    if (cfg.train_frames.empty())
        throw UsageError("config is missing train.frames");
    detail::require(cfg.model, "train.model");
    detail::require_output_dir(cfg.model);
    const auto frames = detail::load_frames_concat(cfg.train_frames);
    TrainingReport report;
    auto options = cfg.training;
    options.track_loss = false;
    const auto model = train_reconstructor(frames, cfg.kind, options, &report);
    detail::write_output(cfg.model, detail::dump_json(model_to_json(model)));
    log << "train: " << to_string(cfg.kind) << " on " << frames.size() << " frames, mean error "
        << format_real(report.initial_error) << " -> " << format_real(report.final_error) << "\n";
}

inline FittedThreshold cmd_fit(const PipelineConfig& cfg, std::ostream& log = std::cout) {
    const auto& sources = cfg.fit_frames.empty() ? cfg.train_frames : cfg.fit_frames;
    if (sources.empty())
        throw UsageError("config is missing fit.frames");
    detail::require(cfg.model, "fit.model");
    detail::require(cfg.params, "fit.params");
    detail::require_output_dir(cfg.params);
    const auto model = detail::load_model(cfg.model);
    ErrorSeries errors;
    for (const auto& path : sources) {
        const auto series = error_series(model, read_frames(path));
        errors.values.insert(errors.values.end(), series.values.begin(), series.values.end());
    }
    if (!cfg.fit_errors.empty())
        detail::write_output(cfg.fit_errors, error_series_to_csv(errors));
    const auto params = fit_gamma_mle(errors);
    const auto threshold = estimate_threshold(params, cfg.epsilon);
    detail::write_output(cfg.params, threshold_to_json(params, threshold, errors.size()));
    log << "fit: alpha " << format_real(params.shape_alpha) << ", rate " << format_real(params.rate_beta)
        << ", theta " << format_real(threshold.theta) << " at epsilon " << format_real(cfg.epsilon) << " ("
        << errors.size() << " samples)\n";
    return {params, threshold};
}

namespace detail {

inline FittedThreshold load_threshold(const PipelineConfig& cfg, const Overrides& overrides) {
    require(cfg.params, "fit.params");
    auto fitted = threshold_from_json(read_text_file(cfg.params));
    if (overrides.epsilon)
        fitted.threshold = estimate_threshold(fitted.params, *overrides.epsilon);
    return fitted;
}

} // namespace detail

inline std::vector<std::int64_t> cmd_detect(const PipelineConfig& cfg, const Overrides& overrides = {},
                                            std::ostream& log = std::cout) {
    detail::require(cfg.detect_frames, "detect.frames");
    detail::require(cfg.alarms, "detect.alarms");
    detail::require(cfg.model, "train.model");
    detail::require_output_dir(cfg.alarms);
    const auto model = detail::load_model(cfg.model);
    const auto fitted = detail::load_threshold(cfg, overrides);
    const auto raw = error_series(model, read_frames(cfg.detect_frames));
    const auto scores = cfg.detect_raw ? raw : ar_filter(raw, cfg.ar);

    DetectorConfig dcfg;
    dcfg.theta = fitted.threshold.theta;
    dcfg.healing_frames_h = cfg.detector_h;
    dcfg.ar = cfg.ar;
    dcfg.validate();
    const auto run = run_detector_with_decisions(scores, dcfg);
    detail::write_output(cfg.alarms, alarm_log_to_csv(scores, run.decisions));
    if (!cfg.detect_errors.empty())
        detail::write_output(cfg.detect_errors, error_series_to_csv(raw));
    if (!cfg.detect_state.empty()) {
        DetectorState state;
        for (double e : scores.values)
            state = detector_step(std::move(state), e, dcfg, scores.start_index).first;
        detail::write_output(cfg.detect_state, detail::dump_json(state_to_json(state)));
    }
    log << "detect: " << run.alarms.size() << " alarms over " << scores.size() << " frames at theta "
        << format_real(dcfg.theta) << "\n";
    return run.alarms;
}

inline std::vector<WindowLabel> cmd_label(const PipelineConfig& cfg, std::ostream& log = std::cout) {
    detail::require(cfg.label_misbehaviour, "label.misbehaviour");
    detail::require(cfg.labels, "label.labels");
    detail::require_output_dir(cfg.labels);
    const auto log_in = misbehaviour_from_csv(read_text_file(cfg.label_misbehaviour));
    const auto labels = label_windows(log_in, cfg.labelling);
    detail::write_output(cfg.labels, labels_to_csv(labels));
    log << "label: " << count_windows(labels, WindowKind::Anomalous) << " anomalous, "
        << count_windows(labels, WindowKind::Normal) << " normal windows\n";
    return labels;
}

/// Default sweep: fitted-gamma quantiles on a probability grid plus
/// empirical quantiles of the scores, bracketed by their extremes.
inline std::vector<double> default_thresholds(const GammaParams& params, std::span<const LabelledSeries> drives) {
    std::set<double> thetas;
    for (int i = 1; i < 200; ++i)
        thetas.insert(gamma_inverse_cdf(i / 200.0, params));
    for (double tail : {1e-3, 1e-4, 1e-5, 1e-6})
        thetas.insert(gamma_inverse_cdf(1.0 - tail, params));
    std::vector<double> pooled;
    for (const auto& d : drives)
        pooled.insert(pooled.end(), d.smoothed.values.begin(), d.smoothed.values.end());
    if (!pooled.empty()) {
        std::sort(pooled.begin(), pooled.end());
        for (int i = 0; i <= 200; ++i) {
            const auto idx = std::min(pooled.size() - 1, pooled.size() * static_cast<std::size_t>(i) / 200);
            if (pooled[idx] > 0.0)
                thetas.insert(pooled[idx]);
        }
        thetas.insert(std::nextafter(pooled.back(), INFINITY));
    }
    return {thetas.begin(), thetas.end()};
}

struct EvalOutcome {
    EvalReport report;
    std::vector<std::pair<std::size_t, SweepResult>> reaction_sweep;
};

/// Scores smoothed error series of labelled drives at theta and across a sweep.
inline EvalOutcome evaluate(std::span<const ErrorSeries> raw, std::span<const MisbehaviourLog> logs,
                            const FittedThreshold& fitted, const PipelineConfig& cfg) {
    auto build = [&](const LabellingConfig& lc) {
        std::vector<LabelledSeries> drives;
        for (std::size_t i = 0; i < raw.size(); ++i)
            drives.push_back({label_windows(logs[i], lc), cfg.detect_raw ? raw[i] : ar_filter(raw[i], cfg.ar)});
        return drives;
    };
    const auto drives = build(cfg.labelling);
    const SweepOptions options{cfg.labelling.healing_h, AlarmSource::Exceedance};
    const auto thetas = cfg.thresholds.empty() ? default_thresholds(fitted.params, drives) : cfg.thresholds;

    EvalOutcome out;
    out.report.theta = fitted.threshold.theta;
    out.report.counts = score_at(drives, fitted.threshold.theta, options);
    out.report.metrics = compute_metrics(out.report.counts);
    out.report.sweep = sweep_curves(drives, thetas, options);
    for (auto r : cfg.reaction_sweep) {
        auto lc = cfg.labelling;
        lc.reaction_r = r;
        const auto swept = build(lc);
        out.reaction_sweep.push_back({r, sweep_curves(swept, thetas, options)});
    }
    return out;
}

inline EvalOutcome cmd_eval(const PipelineConfig& cfg, const Overrides& overrides = {},
                            std::ostream& log = std::cout) {
    if (cfg.eval_frames.empty())
        throw UsageError("config is missing eval.frames");
    detail::require(cfg.report, "eval.report");
    detail::require(cfg.model, "train.model");
    for (const auto* p : {&cfg.report, &cfg.roc, &cfg.pr})
        if (!p->empty())
            detail::require_output_dir(*p);
    const auto model = detail::load_model(cfg.model);
    const auto fitted = detail::load_threshold(cfg, overrides);
    std::vector<ErrorSeries> raw;
    std::vector<MisbehaviourLog> logs;
    for (std::size_t i = 0; i < cfg.eval_frames.size(); ++i) {
        const auto frames = read_frames(cfg.eval_frames[i]);
        auto m = misbehaviour_from_csv(read_text_file(cfg.eval_misbehaviour[i]));
        if (m.size() != frames.size())
            throw UsageError("misbehaviour log length differs from frame count for " + cfg.eval_frames[i]);
        raw.push_back(error_series(model, frames));
        logs.push_back(std::move(m));
    }
    const auto outcome = evaluate(raw, logs, fitted, cfg);

    auto j = report_to_json(outcome.report);
    j["epsilon"] = fitted.threshold.epsilon;
    if (!outcome.reaction_sweep.empty()) {
        auto table = nlohmann::json::array();
        for (const auto& [r, sweep] : outcome.reaction_sweep)
            table.push_back({{"reaction_r", r}, {"auc_pr", optional_json(sweep.auc_pr)},
                             {"auc_roc", optional_json(sweep.auc_roc)}});
        j["reaction_sweep"] = std::move(table);
    }
    detail::write_output(cfg.report, detail::dump_json(j));
    if (!cfg.roc.empty())
        detail::write_output(cfg.roc, roc_to_csv(outcome.report.sweep));
    if (!cfg.pr.empty())
        detail::write_output(cfg.pr, pr_to_csv(outcome.report.sweep));

    const auto& c = outcome.report.counts;
    auto show = [](const std::optional<double>& v) { return v ? format_real(*v) : std::string("n/a"); };
    log << "eval: TP " << c.tp << " FP " << c.fp << " TN " << c.tn << " FN " << c.fn << " | TPR "
        << show(outcome.report.metrics.tpr) << " FPR " << show(outcome.report.metrics.fpr) << " | AUC-ROC "
        << show(outcome.report.sweep.auc_roc) << " AUC-PR " << show(outcome.report.sweep.auc_pr) << "\n";
    for (const auto& [r, sweep] : outcome.reaction_sweep)
        log << "  reaction_r " << r << ": AUC-PR " << show(sweep.auc_pr) << "\n";
    return outcome;
}

/// simulate -> train -> fit -> detect -> eval with one config.
inline void cmd_pipeline(const PipelineConfig& cfg, const Overrides& overrides = {}, std::ostream& log = std::cout) {
    cmd_simulate(cfg, log);
    cmd_train(cfg, log);
    cmd_fit(cfg, log);
    cmd_detect(cfg, overrides, log);
    if (!cfg.label_misbehaviour.empty())
        cmd_label(cfg, log);
    cmd_eval(cfg, overrides, log);
}

} // namespace sentinel
