// Fully-connected networks with hidden nonlinearities and a linear output,
// trained by mean-squared-error backpropagation.
#pragma once

#include <sentinel/error.hpp>
#include <sentinel/random.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace sentinel {

enum class Activation { Sigmoid, Relu };

inline std::string to_string(Activation a) { return a == Activation::Sigmoid ? "sigmoid" : "relu"; }

inline Activation activation_from_string(const std::string& s) {
    if (s == "sigmoid")
        return Activation::Sigmoid;
    if (s == "relu")
        return Activation::Relu;
    throw UsageError("unknown activation \"" + s + "\"");
}

/// weights is row-major (outputs x inputs).
struct DenseLayer {
    std::size_t inputs = 0;
    std::size_t outputs = 0;
    std::vector<double> weights;
    std::vector<double> biases;

    friend bool operator==(const DenseLayer&, const DenseLayer&) = default;
};

/// Per-layer gradients with the same shapes as the network parameters.
struct Gradients {
    std::vector<std::vector<double>> weights;
    std::vector<std::vector<double>> biases;
};

class DenseNetwork {
  public:
    DenseNetwork() = default;

    DenseNetwork(std::vector<std::size_t> layer_sizes, Activation activation)
        : sizes_(std::move(layer_sizes)), activation_(activation) {
        if (sizes_.size() < 2)
            throw UsageError("a network needs at least an input and an output layer");
        for (auto s : sizes_)
            if (s == 0)
                throw UsageError("layer sizes must be positive");
        for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
            DenseLayer layer;
            layer.inputs = sizes_[l];
            layer.outputs = sizes_[l + 1];
            layer.weights.assign(layer.inputs * layer.outputs, 0.0);
            layer.biases.assign(layer.outputs, 0.0);
            layers_.push_back(std::move(layer));
        }
    }

    DenseNetwork(std::vector<DenseLayer> layers, Activation activation) : activation_(activation) {
        if (layers.empty())
            throw UsageError("a network needs at least one layer");
        sizes_.push_back(layers.front().inputs);
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const auto& layer = layers[l];
            if (layer.inputs != sizes_.back())
                throw UsageError("layer " + std::to_string(l) + " does not chain with the previous layer");
            if (layer.weights.size() != layer.inputs * layer.outputs || layer.biases.size() != layer.outputs)
                throw UsageError("layer " + std::to_string(l) + " parameter shape mismatch");
            sizes_.push_back(layer.outputs);
        }
        layers_ = std::move(layers);
    }

    // Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)], biases included.
    void initialize(Rng& rng) {
        for (auto& layer : layers_) {
            const double bound = 1.0 / std::sqrt(static_cast<double>(layer.inputs));
            for (auto& w : layer.weights)
                w = rng.uniform(-bound, bound);
            for (auto& b : layer.biases)
                b = rng.uniform(-bound, bound);
        }
    }

    const std::vector<std::size_t>& layer_sizes() const noexcept { return sizes_; }
    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
    std::vector<DenseLayer>& layers() noexcept { return layers_; }
    Activation activation() const noexcept { return activation_; }
    std::size_t input_size() const noexcept { return sizes_.front(); }
    std::size_t output_size() const noexcept { return sizes_.back(); }

    /// Unclamped output for one input vector.
    std::vector<double> forward(std::span<const double> input) const {
        std::vector<std::vector<double>> acts;
        forward_all(input, acts);
        return std::move(acts.back());
    }

    /// Stores every layer's activation; acts[0] is the input.
    void forward_all(std::span<const double> input, std::vector<std::vector<double>>& acts) const {
        if (input.size() != input_size())
            throw UsageError("network input has wrong length");
        acts.resize(layers_.size() + 1);
        acts[0].assign(input.begin(), input.end());
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            const auto& layer = layers_[l];
            const auto& in = acts[l];
            auto& out = acts[l + 1];
            out.assign(layer.outputs, 0.0);
            for (std::size_t o = 0; o < layer.outputs; ++o) {
                const double* row = layer.weights.data() + o * layer.inputs;
                double sum = layer.biases[o];
                for (std::size_t i = 0; i < layer.inputs; ++i)
                    sum += row[i] * in[i];
                out[o] = sum;
            }
            if (l + 1 < layers_.size())
                for (auto& v : out)
                    v = activate(v);
        }
    }

    Gradients zero_gradients() const {
        Gradients g;
        for (const auto& layer : layers_) {
            g.weights.emplace_back(layer.weights.size(), 0.0);
            g.biases.emplace_back(layer.biases.size(), 0.0);
        }
        return g;
    }

    /// Accumulates d(loss)/d(params) into grads for loss = mean((y - target)^2)
    /// scaled by `weight`, and returns that sample's unscaled loss.
    double backward(std::span<const double> input, std::span<const double> target, double weight,
                    Gradients& grads, std::vector<std::vector<double>>& acts,
                    std::vector<double>& delta, std::vector<double>& next_delta) const {
        if (target.size() != output_size())
            throw UsageError("network target has wrong length");
        forward_all(input, acts);
        const auto& out = acts.back();
        const double scale = 2.0 / static_cast<double>(out.size());
        double loss = 0.0;
        delta.resize(out.size());
        for (std::size_t i = 0; i < out.size(); ++i) {
            const double diff = out[i] - target[i];
            loss += diff * diff;
            delta[i] = weight * scale * diff;
        }
        loss /= static_cast<double>(out.size());

        for (std::size_t l = layers_.size(); l-- > 0;) {
            const auto& layer = layers_[l];
            const auto& in = acts[l];
            auto& gw = grads.weights[l];
            auto& gb = grads.biases[l];
            for (std::size_t o = 0; o < layer.outputs; ++o) {
                const double d = delta[o];
                gb[o] += d;
                if (d == 0.0)
                    continue;
                double* grow = gw.data() + o * layer.inputs;
                for (std::size_t i = 0; i < layer.inputs; ++i)
                    grow[i] += d * in[i];
            }
            if (l == 0)
                break;
            next_delta.assign(layer.inputs, 0.0);
            for (std::size_t o = 0; o < layer.outputs; ++o) {
                const double d = delta[o];
                if (d == 0.0)
                    continue;
                const double* row = layer.weights.data() + o * layer.inputs;
                for (std::size_t i = 0; i < layer.inputs; ++i)
                    next_delta[i] += row[i] * d;
            }
            for (std::size_t i = 0; i < layer.inputs; ++i)
                next_delta[i] *= activate_derivative(in[i]);
            std::swap(delta, next_delta);
        }
        return loss;
    }

    void apply(const Gradients& grads, double learning_rate) {
        for (std::size_t l = 0; l < layers_.size(); ++l) {
            auto& layer = layers_[l];
            for (std::size_t i = 0; i < layer.weights.size(); ++i)
                layer.weights[i] -= learning_rate * grads.weights[l][i];
            for (std::size_t i = 0; i < layer.biases.size(); ++i)
                layer.biases[i] -= learning_rate * grads.biases[l][i];
        }
    }

    friend bool operator==(const DenseNetwork&, const DenseNetwork&) = default;

  private:
    double activate(double v) const {
        if (activation_ == Activation::Sigmoid)
            return 1.0 / (1.0 + std::exp(-v));
        return v > 0.0 ? v : 0.0;
    }

    // Takes the activation output, not the pre-activation.
    double activate_derivative(double activated) const {
        if (activation_ == Activation::Sigmoid)
            return activated * (1.0 - activated);
        return activated > 0.0 ? 1.0 : 0.0;
    }

    std::vector<std::size_t> sizes_;
    std::vector<DenseLayer> layers_;
    Activation activation_ = Activation::Sigmoid;
};

} // namespace sentinel
