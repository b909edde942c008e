#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "fot/distances.hpp"
#include "fot/linalg.hpp"

namespace fot {

enum class DatasetKind { gaussians8, gaussians25, swissroll };

struct DatasetSpec {
    DatasetKind kind = DatasetKind::gaussians8;
    double noise_std = 0.02;
    double scale = 2.0;  ///< circle radius, grid spacing, or spiral extent
    std::uint64_t seed = 0;

    void validate() const;
};

/// Documented defaults per dataset kind.
[[nodiscard]] DatasetSpec default_dataset(DatasetKind kind);

/// How mixture modes are assigned to rows.
enum class ModeOrder {
    random,     ///< uniform i.i.d. choice
    stratified  ///< row i uses mode i mod K
};

using Point2 = std::array<double, 2>;

/// Mixture centers (empty for swissroll).
[[nodiscard]] std::vector<Point2> mode_centers(const DatasetSpec& spec);

/// n samples as an n×2 matrix.
///  - gaussians8: centers on a circle of radius `scale`
///  - gaussians25: 5×5 grid, spacing `scale`, centered at the origin
///  - swissroll: t ∈ [1.5π, 4.5π], (t·cos t, t·sin t)·scale/(4.5π) + noise
[[nodiscard]] Matrix sample_real(const DatasetSpec& spec, std::size_t n, Rng& rng,
                                 ModeOrder order = ModeOrder::random);

/// n×z_dim standard normal latent codes.
[[nodiscard]] Matrix sample_prior(std::size_t z_dim, std::size_t n, Rng& rng);

[[nodiscard]] std::string to_string(DatasetKind kind);
[[nodiscard]] DatasetKind dataset_from_string(const std::string& name);

}  // namespace fot
