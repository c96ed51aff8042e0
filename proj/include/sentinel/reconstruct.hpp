// Image reconstructors (single-image autoencoders and a sequence predictor)
// and the per-frame reconstruction error they produce.
#pragma once

#include <sentinel/dense.hpp>
#include <sentinel/error.hpp>
#include <sentinel/error_series.hpp>
#include <sentinel/frame.hpp>
#include <sentinel/random.hpp>

#include <json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace sentinel {

/// Mean pixel-wise squared difference of two equally-shaped frames.
inline double reconstruction_error(const FrameTensor& x, const FrameTensor& x_prime) {
    if (!x.same_shape(x_prime))
        throw UsageError("reconstruction_error: frame dimensions differ");
    const auto a = x.pixels();
    const auto b = x_prime.pixels();
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        sum += d * d;
    }
    return sum / static_cast<double>(a.size());
}

enum class ReconstructorKind { SAE, DAE, SEQ };

inline std::string to_string(ReconstructorKind k) {
    switch (k) {
    case ReconstructorKind::SAE:
        return "SAE";
    case ReconstructorKind::DAE:
        return "DAE";
    case ReconstructorKind::SEQ:
        return "SEQ";
    }
    return "?";
}

inline ReconstructorKind reconstructor_kind_from_string(const std::string& s) {
    if (s == "SAE" || s == "sae")
        return ReconstructorKind::SAE;
    if (s == "DAE" || s == "dae")
        return ReconstructorKind::DAE;
    if (s == "SEQ" || s == "seq")
        return ReconstructorKind::SEQ;
    throw UsageError("unknown reconstructor kind \"" + s + "\"");
}

/// A trained reconstructor. SAE/DAE map one frame to itself; SEQ maps the
/// history_k preceding frames (oldest first) to a prediction of the next one.
class ReconstructorModel {
  public:
    ReconstructorModel() = default;

    ReconstructorModel(ReconstructorKind kind, DenseNetwork network, std::size_t history_k = 1)
        : kind_(kind), network_(std::move(network)), history_k_(kind == ReconstructorKind::SEQ ? history_k : 1) {
        validate();
    }

    ReconstructorKind kind() const noexcept { return kind_; }
    std::size_t history_k() const noexcept { return history_k_; }
    std::size_t frame_size() const noexcept { return network_.output_size(); }
    const DenseNetwork& network() const noexcept { return network_; }
    DenseNetwork& network() noexcept { return network_; }

    // Frames consumed per reconstruction.
    std::size_t history_length() const noexcept { return kind_ == ReconstructorKind::SEQ ? history_k_ : 1; }

    friend bool operator==(const ReconstructorModel&, const ReconstructorModel&) = default;

  private:
    void validate() const {
        const auto& sizes = network_.layer_sizes();
        if (sizes.size() < 2)
            throw UsageError("reconstructor needs at least one layer");
        const std::size_t hidden_layers = sizes.size() - 2;
        switch (kind_) {
        case ReconstructorKind::SAE:
            if (hidden_layers != 1)
                throw UsageError("SAE must have exactly one hidden layer");
            break;
        case ReconstructorKind::DAE:
            if (hidden_layers != 4)
                throw UsageError("DAE must have exactly five fully-connected layers");
            break;
        case ReconstructorKind::SEQ:
            if (history_k_ == 0)
                throw UsageError("SEQ history_k must be positive");
            break;
        }
        if (sizes.front() != sizes.back() * history_length())
            throw UsageError("input layer size must equal history length times output size");
    }

    ReconstructorKind kind_ = ReconstructorKind::SAE;
    DenseNetwork network_;
    std::size_t history_k_ = 1;
};

struct TrainingOptions {
    std::vector<std::size_t> hidden_sizes{32};
    double learning_rate = 20.0;
    std::size_t epochs = 10;
    std::size_t batch_size = 16;
    std::uint64_t seed = 1;
    std::size_t history_k = 1; // SEQ only
    Activation activation = Activation::Sigmoid;
    bool track_loss = true;
};

struct TrainingReport {
    double initial_error = 0.0;         // mean reconstruction_error before training
    double final_error = 0.0;           // and after
    std::vector<double> epoch_losses;   // unclamped MSE after each epoch
};

namespace detail {

inline std::vector<std::vector<double>> frames_as_double(const FrameStream& stream) {
    std::vector<std::vector<double>> out;
    out.reserve(stream.size());
    for (const auto& f : stream)
        out.emplace_back(f.pixels().begin(), f.pixels().end());
    return out;
}

// Network input for the sample predicting frame `target`.
inline void gather_input(const std::vector<std::vector<double>>& frames, std::size_t target,
                         std::size_t history, bool sequence, std::vector<double>& buffer) {
    if (!sequence) {
        buffer = frames[target];
        return;
    }
    buffer.clear();
    for (std::size_t j = target - history; j < target; ++j)
        buffer.insert(buffer.end(), frames[j].begin(), frames[j].end());
}

inline double mean_loss(const DenseNetwork& net, const std::vector<std::vector<double>>& frames,
                        std::size_t first_target, std::size_t history, bool sequence, bool clamp) {
    std::vector<double> input;
    std::vector<std::vector<double>> acts;
    double total = 0.0;
    for (std::size_t t = first_target; t < frames.size(); ++t) {
        gather_input(frames, t, history, sequence, input);
        net.forward_all(input, acts);
        const auto& out = acts.back();
        double sum = 0.0;
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double y = clamp ? std::clamp(out[i], 0.0, 1.0) : out[i];
            // Compare in float precision to match reconstruction_error exactly.
            const double yf = clamp ? static_cast<double>(static_cast<float>(y)) : y;
            const double d = yf - frames[t][i];
            sum += d * d;
        }
        total += sum / static_cast<double>(out.size());
    }
    return total / static_cast<double>(frames.size() - first_target);
}

} // namespace detail

/// Trains a reconstructor with plain mini-batch SGD on the mean squared error.
/// Weight initialization and batch order derive only from options.seed.
inline ReconstructorModel train_reconstructor(const FrameStream& stream, ReconstructorKind kind,
                                              const TrainingOptions& options,
                                              TrainingReport* report = nullptr) {
    if (stream.empty())
        throw UsageError("train_reconstructor: empty stream");
    if (options.batch_size == 0)
        throw UsageError("train_reconstructor: batch_size must be positive");
    if (!(options.learning_rate > 0.0))
        throw UsageError("train_reconstructor: learning_rate must be positive");
    const bool sequence = kind == ReconstructorKind::SEQ;
    const std::size_t history = sequence ? options.history_k : 1;
    if (sequence && history == 0)
        throw UsageError("train_reconstructor: history_k must be positive");
    if (sequence && stream.size() <= history)
        throw UsageError("train_reconstructor: stream must be longer than history_k");

    const std::size_t frame_size = stream[0].size();
    std::vector<std::size_t> sizes{frame_size * history};
    sizes.insert(sizes.end(), options.hidden_sizes.begin(), options.hidden_sizes.end());
    sizes.push_back(frame_size);

    DenseNetwork net(sizes, options.activation);
    ReconstructorModel probe(kind, net, history); // validates the layer layout
    Rng rng(options.seed);
    net.initialize(rng);

    const auto frames = detail::frames_as_double(stream);
    const std::size_t first_target = sequence ? history : 0;
    std::vector<std::size_t> order;
    for (std::size_t t = first_target; t < frames.size(); ++t)
        order.push_back(t);

    if (report) {
        report->epoch_losses.clear();
        report->initial_error = detail::mean_loss(net, frames, first_target, history, sequence, true);
    }

    auto grads = net.zero_gradients();
    std::vector<double> input;
    std::vector<std::vector<double>> acts;
    std::vector<double> delta, next_delta;
    for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < order.size(); start += options.batch_size) {
            const std::size_t stop = std::min(order.size(), start + options.batch_size);
            const double weight = 1.0 / static_cast<double>(stop - start);
            for (std::size_t l = 0; l < grads.weights.size(); ++l) {
                std::fill(grads.weights[l].begin(), grads.weights[l].end(), 0.0);
                std::fill(grads.biases[l].begin(), grads.biases[l].end(), 0.0);
            }
            for (std::size_t s = start; s < stop; ++s) {
                const std::size_t t = order[s];
                detail::gather_input(frames, t, history, sequence, input);
                net.backward(input, frames[t], weight, grads, acts, delta, next_delta);
            }
            net.apply(grads, options.learning_rate);
        }
        if (report && options.track_loss)
            report->epoch_losses.push_back(detail::mean_loss(net, frames, first_target, history, sequence, false));
    }
    if (report)
        report->final_error = detail::mean_loss(net, frames, first_target, history, sequence, true);
    return ReconstructorModel(kind, std::move(net), history);
}

/// Reconstructs (SAE/DAE) or predicts (SEQ) one frame from its history.
inline FrameTensor reconstruct(const ReconstructorModel& model, std::span<const FrameTensor> history) {
    if (history.size() != model.history_length())
        throw UsageError("reconstruct: expected history of length " + std::to_string(model.history_length()) +
                         ", got " + std::to_string(history.size()));
    const auto& shape = history.front();
    std::vector<double> input;
    input.reserve(model.network().input_size());
    for (const auto& f : history) {
        if (!f.same_shape(shape))
            throw UsageError("reconstruct: history frames differ in shape");
        input.insert(input.end(), f.pixels().begin(), f.pixels().end());
    }
    if (input.size() != model.network().input_size())
        throw UsageError("reconstruct: frame size does not match the model");
    const auto out = model.network().forward(input);
    std::vector<float> pixels(out.size());
    for (std::size_t i = 0; i < out.size(); ++i)
        pixels[i] = static_cast<float>(std::clamp(out[i], 0.0, 1.0));
    return FrameTensor(shape.width(), shape.height(), shape.channels(), std::move(pixels));
}

/// One error per reconstructable frame. SEQ series start at frame history_k.
inline ErrorSeries error_series(const ReconstructorModel& model, const FrameStream& stream) {
    const std::size_t history = model.history_length();
    const bool sequence = model.kind() == ReconstructorKind::SEQ;
    if (stream.size() < (sequence ? history + 1 : 1))
        throw UsageError("error_series: stream too short for the model");
    ErrorSeries series;
    series.start_index = sequence ? static_cast<std::int64_t>(history) : 0;
    const auto frames = stream.frames();
    for (std::size_t t = sequence ? history : 0; t < frames.size(); ++t) {
        const auto window = sequence ? frames.subspan(t - history, history) : frames.subspan(t, 1);
        series.values.push_back(reconstruction_error(frames[t], reconstruct(model, window)));
    }
    return series;
}

// ---------------------------------------------------------------------------
// Model JSON: {"kind","layer_sizes","history_k","activation","weights","biases"}
// with one flat row-major array per layer.

inline nlohmann::json model_to_json(const ReconstructorModel& model) {
    nlohmann::json j;
    j["kind"] = to_string(model.kind());
    j["layer_sizes"] = model.network().layer_sizes();
    j["history_k"] = model.history_k();
    j["activation"] = to_string(model.network().activation());
    auto weights = nlohmann::json::array();
    auto biases = nlohmann::json::array();
    for (const auto& layer : model.network().layers()) {
        weights.push_back(layer.weights);
        biases.push_back(layer.biases);
    }
    j["weights"] = std::move(weights);
    j["biases"] = std::move(biases);
    return j;
}

inline ReconstructorModel model_from_json(const nlohmann::json& j) {
    try {
        const auto kind = reconstructor_kind_from_string(j.at("kind").get<std::string>());
        const auto sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
        const auto history_k = j.at("history_k").get<std::size_t>();
        const auto activation = activation_from_string(j.at("activation").get<std::string>());
        const auto& weights = j.at("weights");
        const auto& biases = j.at("biases");
        if (sizes.size() < 2 || weights.size() != sizes.size() - 1 || biases.size() != sizes.size() - 1)
            throw UsageError("model JSON: layer count mismatch");
        std::vector<DenseLayer> layers;
        for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
            DenseLayer layer;
            layer.inputs = sizes[l];
            layer.outputs = sizes[l + 1];
            layer.weights = weights[l].get<std::vector<double>>();
            layer.biases = biases[l].get<std::vector<double>>();
            layers.push_back(std::move(layer));
        }
        return ReconstructorModel(kind, DenseNetwork(std::move(layers), activation), history_k);
    } catch (const nlohmann::json::exception& e) {
        throw UsageError(std::string("model JSON: ") + e.what());
    }
}

} // namespace sentinel
