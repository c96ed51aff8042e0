// Offline evaluation: window labelling of recorded drives, window-level
// scoring of alarms, rate metrics and threshold sweeps with ROC/PR areas.
#pragma once

#include <sentinel/csv.hpp>
#include <sentinel/detector.hpp>
#include <sentinel/error.hpp>
#include <sentinel/error_series.hpp>
#include <sentinel/misbehaviour.hpp>

#include <json.hpp>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sentinel {

struct LabellingConfig {
    std::size_t window_a = 30;   // anomalous window length
    std::size_t window_b = 30;   // normal window length
    std::size_t reaction_r = 50; // frames between anomalous window and misbehaviour
    std::size_t healing_h = 60;  // frames ignored after a misbehaviour

    void validate() const {
        if (window_a < 1 || window_b < 1 || reaction_r < 1 || healing_h < 1)
            throw UsageError("labelling windows and periods must be at least one frame");
    }
};

enum class WindowKind { Anomalous, Normal, Reaction, Healing, Unlabelled };

inline std::string to_string(WindowKind k) {
    switch (k) {
    case WindowKind::Anomalous:
        return "anomalous";
    case WindowKind::Normal:
        return "normal";
    case WindowKind::Reaction:
        return "reaction";
    case WindowKind::Healing:
        return "healing";
    case WindowKind::Unlabelled:
        return "unlabelled";
    }
    return "?";
}

struct WindowLabel {
    std::size_t start = 0;
    std::size_t length = 0;
    WindowKind kind = WindowKind::Unlabelled;

    std::size_t last() const noexcept { return start + length - 1; }
    bool contains(std::int64_t frame) const noexcept {
        return frame >= static_cast<std::int64_t>(start) && frame < static_cast<std::int64_t>(start + length);
    }

    friend bool operator==(const WindowLabel&, const WindowLabel&) = default;
};

/// Labels a recorded drive. Precedence is healing > reaction > anomalous >
/// normal; a lower-precedence window that would touch a misbehaviour or an
/// already reserved frame is dropped, never truncated.
///
///  - healing: the h frames after each misbehaviour, cut short at the next one;
///  - reaction: the r misbehaviour-free frames right before a misbehaviour;
///  - anomalous: the a frames right before a valid reaction period;
///  - normal: b-frame windows tiled backwards from each anomalous window, and
///    forwards from the end of the last healing period for windows starting no
///    later than frame n - r - a - 1.
///
/// The result partitions [0, n): frames in no window come back as Unlabelled
/// runs. Windows are ordered by start frame.
inline std::vector<WindowLabel> label_windows(const MisbehaviourLog& log, const LabellingConfig& cfg) {
    cfg.validate();
    const std::size_t n = log.size();
    const auto events = log.frames();
    // reserved[j]: frame already belongs to a window (or is a misbehaviour).
    std::vector<bool> reserved(n, false);
    for (auto t : events)
        reserved[t] = true;
    std::vector<WindowLabel> windows;

    auto free_range = [&](std::int64_t first, std::size_t length) {
        if (first < 0 || static_cast<std::size_t>(first) + length > n)
            return false;
        for (std::size_t j = static_cast<std::size_t>(first); j < static_cast<std::size_t>(first) + length; ++j)
            if (reserved[j])
                return false;
        return true;
    };
    auto claim = [&](std::size_t first, std::size_t length, WindowKind kind) {
        for (std::size_t j = first; j < first + length; ++j)
            reserved[j] = true;
        windows.push_back({first, length, kind});
    };

    for (std::size_t e = 0; e < events.size(); ++e) {
        const std::size_t t = events[e];
        std::size_t end = std::min(t + cfg.healing_h, n - 1);
        if (e + 1 < events.size() && events[e + 1] - t - 1 < cfg.healing_h)
            end = events[e + 1] - 1;
        if (end >= t + 1)
            claim(t + 1, end - t, WindowKind::Healing);
    }

    std::vector<std::size_t> reaction_starts;
    for (auto t : events) {
        const auto first = static_cast<std::int64_t>(t) - static_cast<std::int64_t>(cfg.reaction_r);
        if (free_range(first, cfg.reaction_r)) {
            claim(static_cast<std::size_t>(first), cfg.reaction_r, WindowKind::Reaction);
            reaction_starts.push_back(static_cast<std::size_t>(first));
        }
    }

    std::vector<std::size_t> anomalous_starts;
    for (auto s : reaction_starts) {
        const auto first = static_cast<std::int64_t>(s) - static_cast<std::int64_t>(cfg.window_a);
        if (free_range(first, cfg.window_a)) {
            claim(static_cast<std::size_t>(first), cfg.window_a, WindowKind::Anomalous);
            anomalous_starts.push_back(static_cast<std::size_t>(first));
        }
    }

    for (auto s : anomalous_starts) {
        auto first = static_cast<std::int64_t>(s) - static_cast<std::int64_t>(cfg.window_b);
        while (free_range(first, cfg.window_b)) {
            claim(static_cast<std::size_t>(first), cfg.window_b, WindowKind::Normal);
            first -= static_cast<std::int64_t>(cfg.window_b);
        }
    }

    // Trailing normal windows after the last misbehaviour's healing period.
    const std::int64_t trailing_from =
        events.empty() ? 0 : static_cast<std::int64_t>(events.back() + cfg.healing_h + 1);
    const std::int64_t last_start = static_cast<std::int64_t>(n) - static_cast<std::int64_t>(cfg.reaction_r) -
                                    static_cast<std::int64_t>(cfg.window_a) - 1;
    for (std::int64_t first = trailing_from; first <= last_start; first += static_cast<std::int64_t>(cfg.window_b))
        if (free_range(first, cfg.window_b))
            claim(static_cast<std::size_t>(first), cfg.window_b, WindowKind::Normal);

    std::sort(windows.begin(), windows.end(), [](const auto& x, const auto& y) { return x.start < y.start; });
    std::vector<WindowLabel> out;
    std::size_t cursor = 0;
    for (const auto& w : windows) {
        if (w.start > cursor)
            out.push_back({cursor, w.start - cursor, WindowKind::Unlabelled});
        out.push_back(w);
        cursor = w.start + w.length;
    }
    if (cursor < n)
        out.push_back({cursor, n - cursor, WindowKind::Unlabelled});
    return out;
}

inline std::size_t count_windows(std::span<const WindowLabel> labels, WindowKind kind) {
    return static_cast<std::size_t>(
        std::count_if(labels.begin(), labels.end(), [kind](const auto& w) { return w.kind == kind; }));
}

struct ConfusionCounts {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t tn = 0;
    std::size_t fn = 0;
    std::size_t excluded = 0; // normal windows dropped by the consecutive-FP rule

    ConfusionCounts& operator+=(const ConfusionCounts& o) {
        tp += o.tp;
        fp += o.fp;
        tn += o.tn;
        fn += o.fn;
        excluded += o.excluded;
        return *this;
    }

    friend bool operator==(const ConfusionCounts&, const ConfusionCounts&) = default;
};

/// Window-level scoring. An anomalous window holding an alarm is a TP, else
/// a FN; a normal window holding an alarm is a FP, else a TN. A normal window
/// whose first alarm comes at most h frames after the first alarm of the last
/// counted FP window is excluded. Alarms outside anomalous and normal windows
/// are ignored.
inline ConfusionCounts score_windows(std::span<const WindowLabel> labels, std::span<const std::int64_t> alarms,
                                     std::size_t h) {
    if (!std::is_sorted(alarms.begin(), alarms.end()))
        throw UsageError("score_windows: alarms must be sorted ascending");
    std::vector<const WindowLabel*> ordered;
    for (const auto& w : labels)
        ordered.push_back(&w);
    std::stable_sort(ordered.begin(), ordered.end(), [](auto* x, auto* y) { return x->start < y->start; });

    ConfusionCounts counts;
    std::optional<std::int64_t> last_fp_alarm;
    for (const auto* w : ordered) {
        if (w->kind != WindowKind::Anomalous && w->kind != WindowKind::Normal)
            continue;
        const auto it = std::lower_bound(alarms.begin(), alarms.end(), static_cast<std::int64_t>(w->start));
        const bool hit = it != alarms.end() && w->contains(*it);
        if (w->kind == WindowKind::Anomalous) {
            (hit ? counts.tp : counts.fn) += 1;
        } else if (!hit) {
            counts.tn += 1;
        } else if (last_fp_alarm && *it - *last_fp_alarm <= static_cast<std::int64_t>(h)) {
            counts.excluded += 1;
        } else {
            counts.fp += 1;
            last_fp_alarm = *it;
        }
    }
    return counts;
}

/// Rates with undefined ratios left empty.
struct RateMetrics {
    std::optional<double> tpr;
    std::optional<double> fpr;
    std::optional<double> precision;
    std::optional<double> f1;
};

inline RateMetrics compute_metrics(std::size_t tp, std::size_t fp, std::size_t tn, std::size_t fn) {
    RateMetrics m;
    const auto ratio = [](std::size_t num, std::size_t den) -> std::optional<double> {
        if (den == 0)
            return std::nullopt;
        return static_cast<double>(num) / static_cast<double>(den);
    };
    m.tpr = ratio(tp, tp + fn);
    m.fpr = ratio(fp, fp + tn);
    m.precision = ratio(tp, tp + fp);
    if (m.tpr && m.precision && *m.tpr + *m.precision > 0.0)
        m.f1 = 2.0 * *m.precision * *m.tpr / (*m.precision + *m.tpr);
    return m;
}

inline RateMetrics compute_metrics(const ConfusionCounts& c) { return compute_metrics(c.tp, c.fp, c.tn, c.fn); }

// ---------------------------------------------------------------------------
// Threshold sweeps.

/// How alarms are derived from a smoothed series for scoring.
enum class AlarmSource {
    Exceedance, // every frame with smoothed error >= theta
    Detector,   // the online detector, cooldown included
};

struct SweepOptions {
    std::size_t healing_h = 60;
    AlarmSource alarms = AlarmSource::Exceedance;
};

/// One labelled, smoothed drive.
struct LabelledSeries {
    std::vector<WindowLabel> labels;
    ErrorSeries smoothed;
};

struct CurvePoint {
    double x = 0.0;
    double y = 0.0;
};

struct SweepPoint {
    double theta = 0.0;
    ConfusionCounts counts;
    RateMetrics metrics;
};

struct SweepResult {
    std::vector<SweepPoint> points;    // ascending theta
    std::vector<CurvePoint> roc;       // (fpr, tpr), anchors included
    std::vector<CurvePoint> pr;        // (recall, precision), anchors included
    std::optional<double> auc_roc;
    std::optional<double> auc_pr;
    double prevalence = 0.0;           // anomalous / (anomalous + normal) windows
};

inline std::vector<std::int64_t> alarms_at(const ErrorSeries& smoothed, double theta, const SweepOptions& options) {
    if (options.alarms == AlarmSource::Detector) {
        DetectorConfig cfg;
        cfg.theta = theta;
        cfg.healing_frames_h = options.healing_h;
        return run_detector(smoothed, cfg);
    }
    std::vector<std::int64_t> alarms;
    for (std::size_t i = 0; i < smoothed.size(); ++i)
        if (smoothed.values[i] >= theta)
            alarms.push_back(smoothed.frame_index(i));
    return alarms;
}

/// Pooled counts across drives at one threshold.
inline ConfusionCounts score_at(std::span<const LabelledSeries> drives, double theta, const SweepOptions& options) {
    ConfusionCounts total;
    for (const auto& d : drives)
        total += score_windows(d.labels, alarms_at(d.smoothed, theta, options), options.healing_h);
    return total;
}

inline double trapezoid(const std::vector<CurvePoint>& pts) {
    double area = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        area += (pts[i].x - pts[i - 1].x) * (pts[i].y + pts[i - 1].y) * 0.5;
    return area;
}

/// Scores every threshold, then integrates ROC (anchored at (0,0) and (1,1))
/// and PR (anchored at recall 0 with the precision of the lowest-recall point,
/// and at recall 1 with the positive prevalence) by the trapezoid rule.
inline SweepResult sweep_curves(std::span<const LabelledSeries> drives, std::vector<double> thetas,
                                const SweepOptions& options = {}) {
    if (thetas.empty())
        throw UsageError("sweep_curves: threshold list is empty");
    std::sort(thetas.begin(), thetas.end());
    SweepResult result;
    std::size_t positives = 0;
    std::size_t negatives = 0;
    for (const auto& d : drives) {
        positives += count_windows(d.labels, WindowKind::Anomalous);
        negatives += count_windows(d.labels, WindowKind::Normal);
    }
    if (positives + negatives > 0)
        result.prevalence = static_cast<double>(positives) / static_cast<double>(positives + negatives);

    for (double theta : thetas) {
        SweepPoint p;
        p.theta = theta;
        p.counts = score_at(drives, theta, options);
        p.metrics = compute_metrics(p.counts);
        result.points.push_back(p);
    }

    // Within ties on x, order as the sweep runs from high to low thresholds.
    std::vector<std::pair<double, CurvePoint>> roc, pr;
    for (const auto& p : result.points) {
        if (p.metrics.tpr && p.metrics.fpr)
            roc.push_back({p.theta, {*p.metrics.fpr, *p.metrics.tpr}});
        if (p.metrics.tpr && p.metrics.precision)
            pr.push_back({p.theta, {*p.metrics.tpr, *p.metrics.precision}});
    }
    auto by_x = [](const auto& a, const auto& b) {
        if (a.second.x != b.second.x)
            return a.second.x < b.second.x;
        return a.first > b.first;
    };
    std::sort(roc.begin(), roc.end(), by_x);
    std::sort(pr.begin(), pr.end(), by_x);

    if (!roc.empty()) {
        result.roc.push_back({0.0, 0.0});
        for (const auto& [t, pt] : roc)
            result.roc.push_back(pt);
        result.roc.push_back({1.0, 1.0});
        result.auc_roc = trapezoid(result.roc);
    }
    if (!pr.empty()) {
        result.pr.push_back({0.0, pr.front().second.y});
        for (const auto& [t, pt] : pr)
            result.pr.push_back(pt);
        result.pr.push_back({1.0, result.prevalence});
        result.auc_pr = trapezoid(result.pr);
    }
    return result;
}

inline SweepResult sweep_curves(const std::vector<WindowLabel>& labels, const ErrorSeries& smoothed,
                                std::vector<double> thetas, const SweepOptions& options = {}) {
    const LabelledSeries drive{labels, smoothed};
    return sweep_curves(std::span<const LabelledSeries>(&drive, 1), std::move(thetas), options);
}

// ---------------------------------------------------------------------------
// Report output.

struct EvalReport {
    double theta = 0.0;
    ConfusionCounts counts;
    RateMetrics metrics;
    SweepResult sweep;
};

inline nlohmann::json optional_json(const std::optional<double>& v) {
    return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

inline nlohmann::json report_to_json(const EvalReport& r) {
    nlohmann::json j;
    j["theta"] = r.theta;
    j["counts"] = {{"tp", r.counts.tp}, {"fp", r.counts.fp}, {"tn", r.counts.tn}, {"fn", r.counts.fn},
                   {"excluded", r.counts.excluded}};
    j["metrics"] = {{"tpr", optional_json(r.metrics.tpr)},
                    {"fpr", optional_json(r.metrics.fpr)},
                    {"precision", optional_json(r.metrics.precision)},
                    {"f1", optional_json(r.metrics.f1)}};
    auto points = [](const std::vector<CurvePoint>& pts) {
        auto arr = nlohmann::json::array();
        for (const auto& p : pts)
            arr.push_back({p.x, p.y});
        return arr;
    };
    j["roc_points"] = points(r.sweep.roc);
    j["pr_points"] = points(r.sweep.pr);
    j["auc_roc"] = optional_json(r.sweep.auc_roc);
    j["auc_pr"] = optional_json(r.sweep.auc_pr);
    return j;
}

inline std::string roc_to_csv(const SweepResult& s) {
    std::string out = "threshold,fpr,tpr\n";
    for (const auto& p : s.points)
        if (p.metrics.fpr && p.metrics.tpr)
            out += format_real(p.theta) + "," + format_real(*p.metrics.fpr) + "," + format_real(*p.metrics.tpr) + "\n";
    return out;
}

inline std::string pr_to_csv(const SweepResult& s) {
    std::string out = "threshold,recall,precision\n";
    for (const auto& p : s.points)
        if (p.metrics.tpr && p.metrics.precision)
            out += format_real(p.theta) + "," + format_real(*p.metrics.tpr) + "," +
                   format_real(*p.metrics.precision) + "\n";
    return out;
}

inline std::string labels_to_csv(std::span<const WindowLabel> labels) {
    std::string out = "start,length,kind\n";
    for (const auto& w : labels)
        out += std::to_string(w.start) + "," + std::to_string(w.length) + "," + to_string(w.kind) + "\n";
    return out;
}

} // namespace sentinel
