#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include "fot/distances.hpp"
#include "fot/linalg.hpp"

namespace fot {

enum class Activation { relu, linear, sigmoid };

struct Layer {
    Matrix weight;  ///< in × out
    Vector bias;    ///< out

    friend bool operator==(const Layer&, const Layer&) = default;
};

/// Multilayer perceptron: ReLU on every hidden layer, `output_activation` on
/// the last one.
struct MlpParams {
    std::vector<Layer> layers;
    Activation hidden_activation = Activation::relu;
    Activation output_activation = Activation::linear;

    [[nodiscard]] std::size_t input_dim() const;
    [[nodiscard]] std::size_t output_dim() const;
    [[nodiscard]] std::size_t parameter_count() const;
    /// Throws ConfigError if layer dims do not chain or entries are non-finite.
    void validate() const;

    friend bool operator==(const MlpParams&, const MlpParams&) = default;
};

/// Weights ~ N(0, init_std²), zero biases. `widths` lists every layer width
/// from input to output.
[[nodiscard]] MlpParams make_mlp(const std::vector<std::size_t>& widths, Activation output,
                                 double init_std, Rng& rng);

/// Same topology with every entry zero; used for gradients and optimizer moments.
[[nodiscard]] MlpParams zeros_like(const MlpParams& params);

struct ForwardCache {
    std::vector<Matrix> inputs;       ///< input to layer l
    std::vector<Matrix> pre;          ///< pre-activation of layer l
    std::vector<Matrix> activations;  ///< post-activation of layer l
    bool includes_output = true;      ///< false when the last evaluated layer is hidden
};

struct ForwardResult {
    Matrix output;
    ForwardCache cache;
};

struct BackwardResult {
    MlpParams param_grads;
    Matrix input_grads;
};

[[nodiscard]] ForwardResult mlp_forward(const MlpParams& params, const Matrix& x);

/// Reverse-mode gradients for a cache produced by mlp_forward or
/// features_forward. Layers not evaluated in the cache get zero gradients.
[[nodiscard]] BackwardResult mlp_backward(const MlpParams& params, const ForwardCache& cache,
                                          const Matrix& grad_output);

/// Activations of the last hidden layer (the input to the output layer).
/// Throws ConfigError for a network without hidden layers.
[[nodiscard]] Matrix extract_features(const MlpParams& params, const Matrix& x);
/// extract_features plus the cache needed to backpropagate into the input.
[[nodiscard]] ForwardResult features_forward(const MlpParams& params, const Matrix& x);

inline constexpr double kProbabilityClamp = 1e-7;

struct BceResult {
    double loss = 0.0;
    Matrix grad_real;
    Matrix grad_fake;
};

/// mean(−log d_real) + mean(−log(1 − d_fake)). Entries must lie in (0, 1).
[[nodiscard]] BceResult bce_discriminator_loss(const Matrix& d_real, const Matrix& d_fake);

/// Clamps probabilities to [kProbabilityClamp, 1 − kProbabilityClamp].
[[nodiscard]] Matrix clamp_probabilities(Matrix p);

enum class OptimizerKind { adam, sgd };

struct OptimizerConfig {
    OptimizerKind kind = OptimizerKind::adam;
    double lr = 1e-3;
    double beta1 = 0.5;
    double beta2 = 0.999;
    double eps = 1e-8;
};

struct AdamState {
    OptimizerConfig config;
    MlpParams m;
    MlpParams v;
    long step = 0;
};

[[nodiscard]] AdamState make_adam_state(const MlpParams& params, const OptimizerConfig& config);

/// One optimizer step in place. Adam uses bias-corrected moments; the SGD
/// kind applies params −= lr·grads and leaves the moments untouched.
void adam_step(MlpParams& params, const MlpParams& grads, AdamState& state);

/// JSON checkpoint: {"format": "fot-mlp", "version": 1, activations, layers}.
void save_checkpoint(const std::filesystem::path& path, const MlpParams& params);
[[nodiscard]] MlpParams load_checkpoint(const std::filesystem::path& path);
[[nodiscard]] std::string to_checkpoint_json(const MlpParams& params);
[[nodiscard]] MlpParams from_checkpoint_json(const std::string& text);

[[nodiscard]] std::string to_string(Activation a);
[[nodiscard]] Activation activation_from_string(const std::string& name);

}  // namespace fot
