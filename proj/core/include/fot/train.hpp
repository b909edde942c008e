#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fot/data.hpp"
#include "fot/distances.hpp"
#include "fot/error.hpp"
#include "fot/nn.hpp"

namespace fot {

enum class GenLoss { frechet, ot, swg, max_swg };

[[nodiscard]] std::string to_string(GenLoss loss);
[[nodiscard]] GenLoss gen_loss_from_string(const std::string& name);

struct TrainConfig {
    DatasetSpec dataset = default_dataset(DatasetKind::gaussians8);
    GenLoss gen_loss = GenLoss::frechet;
    std::size_t batch_size = 256;
    std::size_t steps = 5000;
    std::size_t d_steps_per_g = 1;
    OptimizerConfig d_optimizer{};
    OptimizerConfig g_optimizer{};
    int sqrt_iterations = 15;
    std::size_t swg_projections = 512;
    std::size_t max_swg_candidates = 64;
    std::size_t max_swg_ascent_steps = 10;
    int ot_exponent = 2;
    std::size_t z_dim = 10;
    std::vector<std::size_t> g_hidden{128, 128};
    std::vector<std::size_t> d_hidden{128, 128};
    double init_std = 0.02;
    std::uint64_t seed = 7;
    std::size_t snapshot_every = 500;
    std::size_t snapshot_points = 1000;
    double coverage_radius = 0.5;
    /// When false the timing columns are written as 0 so output is reproducible byte for byte.
    bool record_timing = true;
    /// Empty disables all file output.
    std::filesystem::path out_dir;

    /// Throws ConfigError on invalid values.
    void validate() const;
};

struct MetricsRow {
    std::size_t step = 0;
    double d_loss = 0.0;
    double g_loss = 0.0;
    double d_ms = 0.0;
    double g_fwd_ms = 0.0;
    double g_bwd_ms = 0.0;
    std::optional<std::size_t> mode_coverage;
    std::optional<double> hq_fraction;
};

inline constexpr const char* kMetricsHeader =
    "step,d_loss,g_loss,d_ms,g_fwd_ms,g_bwd_ms,mode_coverage,hq_fraction";
inline constexpr const char* kSnapshotHeader = "step,x,y";

[[nodiscard]] std::string format_metrics_row(const MetricsRow& row);

struct CoverageResult {
    std::size_t covered = 0;
    double high_quality_fraction = 0.0;
};

/// A center is covered when at least 1% of samples lie within `radius` of it;
/// the high-quality fraction is the share of samples within `radius` of any center.
[[nodiscard]] CoverageResult mode_coverage(const Matrix& samples, const std::vector<Point2>& centers,
                                           double radius);

struct Models {
    MlpParams generator;
    MlpParams discriminator;
};

/// Generator z→hidden→2 (linear) and discriminator 2→hidden→1 (sigmoid),
/// initialized from the config seed.
[[nodiscard]] Models initial_models(const TrainConfig& cfg);

struct LossAndGrads {
    double loss = 0.0;
    MlpParams grads;
    double forward_ms = 0.0;
    double backward_ms = 0.0;
};

/// BCE loss of the discriminator on a real and a fake batch, with gradients
/// w.r.t. the discriminator parameters.
[[nodiscard]] LossAndGrads discriminator_loss_and_grad(const MlpParams& disc, const Matrix& real,
                                                       const Matrix& fake);

/// Generator loss in the discriminator's feature space and its gradient
/// w.r.t. the generator parameters. The discriminator is held fixed and the
/// real features are constants. `warm`, when given, carries eigenbases from
/// one call to the next to speed up the Fréchet path.
[[nodiscard]] LossAndGrads generator_loss_and_grad(const MlpParams& gen, const MlpParams& disc,
                                                   const Matrix& z, const Matrix& real,
                                                   const TrainConfig& cfg, Rng& rng,
                                                   FrechetWarmStart* warm = nullptr);

/// Raised when a training step fails numerically.
class TrainingAborted : public Error {
public:
    TrainingAborted(const std::string& what, std::size_t step) : Error(what), step_(step) {}
    [[nodiscard]] std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

struct TrainObserver {
    /// Called after every discriminator update.
    std::function<void(std::size_t step, const MlpParams& disc)> on_discriminator_update;
    std::function<void(const MetricsRow&)> on_metrics;
};

struct TrainResult {
    Models models;
    std::vector<MetricsRow> metrics;
};

/// Alternating training: k BCE steps for the discriminator, then one
/// generator step on the selected feature-space distance. Writes
/// metrics.csv, snapshots/step_NNNNNN.csv, generator.json and
/// discriminator.json under cfg.out_dir when it is set.
[[nodiscard]] TrainResult train_gan(const TrainConfig& cfg, const TrainObserver& observer = {});

}  // namespace fot
