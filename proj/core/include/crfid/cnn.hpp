#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "crfid/features.hpp"

namespace crfid {

class Rng;

// Batch of 1-D multichannel signals, contiguous [batch][length][channels].
struct Tensor {
    std::vector<double> data;
    std::size_t batch = 0;
    std::size_t length = 0;
    std::size_t channels = 0;

    void resize(std::size_t b, std::size_t l, std::size_t c) {
        batch = b;
        length = l;
        channels = c;
        data.assign(b * l * c, 0.0);
    }
    double& at(std::size_t b, std::size_t l, std::size_t c) {
        return data[(b * length + l) * channels + c];
    }
    const double& at(std::size_t b, std::size_t l, std::size_t c) const {
        return data[(b * length + l) * channels + c];
    }
};

enum class LayerType { Conv1D, MaxPool, BatchNorm, Dropout, Flatten, Dense };

struct LayerSpec {
    LayerType type;
    int filters = 0;   // Conv1D
    int kernel = 7;    // Conv1D (valid padding)
    bool relu = false; // Conv1D / Dense activation
    int units = 0;     // Dense
    double rate = 0.5; // Dropout

    static LayerSpec conv(int filters, int kernel = 7) { return {LayerType::Conv1D, filters, kernel, true, 0, 0.5}; }
    static LayerSpec pool() { return {LayerType::MaxPool, 0, 0, false, 0, 0.5}; }
    static LayerSpec batch_norm() { return {LayerType::BatchNorm, 0, 0, false, 0, 0.5}; }
    static LayerSpec dropout(double rate = 0.5) { return {LayerType::Dropout, 0, 0, false, 0, rate}; }
    static LayerSpec flatten() { return {LayerType::Flatten, 0, 0, false, 0, 0.5}; }
    static LayerSpec dense(int units, bool relu_act) { return {LayerType::Dense, 0, 0, relu_act, units, 0.5}; }
};

struct ArchitectureSpec {
    std::string name;
    std::vector<LayerSpec> layers;

    // Throws DataError unless the final layer is Dense(1, linear), pools are
    // 2/2, dense layers come only after a single flatten, and batch norm
    // appears only before the flatten.
    void validate() const;
};

// The paper's four architectures: 1/3 regress the tag ID, 2/4 the sensing
// capacitance. All convs are kernel-7 valid ReLU; pools 2/2; dropouts 0.5.
ArchitectureSpec model_1_spec();
ArchitectureSpec model_2_spec();
ArchitectureSpec model_3_spec();
ArchitectureSpec model_4_spec();

// Copy with conv filter counts and hidden dense units scaled down (floors 4
// and 8); the final Dense(1) stays. For desk-scale training runs.
ArchitectureSpec reduced_spec(const ArchitectureSpec& spec, double width_scale, const std::string& name);

// Post-layer (length, channels) chain; flatten maps to (1, length*channels).
// Throws DataError, naming the layer index, if any shape degenerates.
std::vector<std::pair<int, int>> compute_shapes(const ArchitectureSpec& spec, int input_length);

inline constexpr double kBnMomentum = 0.9;
inline constexpr double kBnEps = 1e-5;

// Offsets into the flat parameter vector for one layer.
struct LayerSlots {
    std::size_t w_off = 0, w_len = 0; // conv kernels / dense weights / bn gamma
    std::size_t b_off = 0, b_len = 0; // biases / bn beta
    std::size_t s_off = 0, s_len = 0; // bn running-stat channels
};

struct CnnModel {
    ArchitectureSpec spec;
    int input_length = 0;
    std::vector<double> params;       // all trainable parameters
    std::vector<double> running_mean; // batch-norm state, s_off/s_len slices
    std::vector<double> running_var;
    std::vector<LayerSlots> slots;
    std::vector<std::pair<int, int>> shapes; // per-layer output shapes
};

// Build a model with He-uniform weights from derive_seed(seed, {0}); biases
// zero; batch-norm gamma 1, beta 0, running stats (0, 1).
CnnModel make_cnn(const ArchitectureSpec& spec, int input_length, std::uint64_t seed);

// Per-layer forward caches for one training batch.
struct ForwardCache {
    Tensor input;
    std::vector<Tensor> outputs;            // post-activation output per layer
    std::vector<Tensor> pre_act;            // conv/dense pre-activation
    std::vector<std::vector<int>> argmax;   // pool: flat input offset per output element
    std::vector<std::vector<double>> xhat;  // bn: normalized input
    std::vector<std::vector<double>> ivar;  // bn: per-channel 1/sqrt(var+eps)
    std::vector<std::vector<double>> mask;  // dropout multipliers
    std::size_t batch = 0;
};

// Training-mode forward: batch statistics for batch norm (running stats
// updated in `model`), dropout active with inverted scaling driven by
// `dropout_rng`. Returns one prediction per batch row and fills `cache`.
std::vector<double> forward_train(CnnModel& model, const Tensor& input, Rng& dropout_rng,
                                  ForwardCache& cache);

// Inference-mode forward: running statistics, dropout = identity.
std::vector<double> forward_infer(const CnnModel& model, const Tensor& input);

// Gradients of the scalar loss w.r.t. every parameter, given d(loss)/d(pred)
// per batch row and the cache from forward_train on the same batch.
// Throws DataError on a cache that does not match the model or batch.
std::vector<double> backward(const CnnModel& model, const ForwardCache& cache,
                             const std::vector<double>& dpred);

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
};

// One bias-corrected Adam update; t is the 1-based step index.
void adam_step(std::vector<double>& params, const std::vector<double>& grads, AdamState& state,
               long t, const AdamConfig& config);

// Rows of a FeatureMatrix as a (n, length, 1) tensor (optionally a subset).
Tensor to_tensor(const FeatureMatrix& X);
Tensor to_tensor(const FeatureMatrix& X, const std::vector<int>& rows);

} // namespace crfid
