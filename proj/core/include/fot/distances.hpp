#pragma once

#include <chrono>
#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "fot/linalg.hpp"
#include "fot/stats.hpp"

namespace fot {

using Rng = std::mt19937_64;

/// A perfect matching between two equal-size sample sets: real row i is
/// matched to generated row perm[i].
struct Assignment {
    std::vector<std::size_t> perm;

    [[nodiscard]] std::size_t size() const noexcept { return perm.size(); }
    [[nodiscard]] bool is_permutation() const;
    /// inverse()[j] = i  iff  perm[i] = j.
    [[nodiscard]] std::vector<std::size_t> inverse() const;
};

struct DistanceReport {
    double value = 0.0;
    std::optional<Matrix> grad;  ///< ∂value/∂(generated rows), same shape as the input
    std::chrono::nanoseconds elapsed{0};
};

enum class SqrtMethod { newton_schulz, eig };

struct SqrtConfig {
    SqrtMethod method = SqrtMethod::newton_schulz;
    int iterations = 15;
    double jitter = 1e-10;
};

// ---------------------------------------------------------------------------
// Fréchet distance between Gaussians

/// ‖μ_d − μ_g‖² + Tr(Σ_d + Σ_g − 2·(Σ_d^{1/2}·Σ_g·Σ_d^{1/2})^{1/2}).
///
/// Σ_d^{1/2} is always taken by eigendecomposition; the outer root uses
/// `cfg.method`. Values within 1e-8·max(1, Tr Σ_d + Tr Σ_g) below zero are
/// clamped to 0.
[[nodiscard]] double frechet_distance(const GaussianStats& pd, const GaussianStats& pg,
                                      const SqrtConfig& cfg = {});

/// Intermediates of the Fréchet forward pass kept for the backward pass.
struct FrechetForward {
    double value = 0.0;
    GaussianStats pg;
    Vector mean_delta;  ///< μ_g − μ_d
    Matrix centered;    ///< generated features minus μ_g
    Matrix root_d;      ///< Σ_d^{1/2}
    Matrix sqrt_term;   ///< (Σ_d^{1/2}·Σ_g·Σ_d^{1/2})^{1/2}
};

/// Eigenbases kept between calls so consecutive, slowly changing problems
/// (training steps) start their eigendecompositions close to the answer.
struct FrechetWarmStart {
    std::optional<Matrix> basis_d;     ///< eigenvectors of Σ_d
    std::optional<Matrix> basis_sqrt;  ///< eigenvectors of the outer root
};

/// Forward pass of the Fréchet loss on generated features (N×d).
[[nodiscard]] FrechetForward frechet_forward(const Matrix& feat_g, const GaussianStats& pd,
                                             const SqrtConfig& cfg = {},
                                             FrechetWarmStart* warm = nullptr);
/// Gradient of the forward value w.r.t. every generated feature entry. The
/// square root's derivative comes from the eigenbasis Sylvester solver.
[[nodiscard]] Matrix frechet_backward(const FrechetForward& fwd, FrechetWarmStart* warm = nullptr);
/// frechet_forward + frechet_backward, timed.
[[nodiscard]] DistanceReport frechet_grad(const Matrix& feat_g, const GaussianStats& pd,
                                          const SqrtConfig& cfg = {});

// ---------------------------------------------------------------------------
// Exact optimal transport

struct OtResult {
    double cost = 0.0;
    Assignment assignment;
};

/// N×N cost matrix of ‖x_i − y_j‖^p, p ∈ {1, 2}.
[[nodiscard]] Matrix pairwise_cost(const Matrix& x, const Matrix& y, int p);

/// Minimum-cost perfect matching (Hungarian algorithm with potentials, O(N³)).
/// Throws ShapeError on N/width mismatch, EmptyInputError when N = 0.
[[nodiscard]] Assignment solve_assignment(const Matrix& cost);

/// min over permutations of Σ_i ‖x_i − y_perm(i)‖^p.
[[nodiscard]] OtResult ot_cost(const Matrix& x, const Matrix& y, int p = 2);

/// ∂/∂y of Σ_i ‖x_i − y_perm(i)‖^p with the assignment held fixed.
[[nodiscard]] Matrix ot_grad(const Matrix& x, const Matrix& y, const Assignment& assignment,
                             int p = 2);

/// Correctly rounded sum of the terms, so the result does not depend on their
/// order. Falls back to a plain sum on non-finite terms or overflow.
[[nodiscard]] double canonical_sum(std::vector<double> terms);

// ---------------------------------------------------------------------------
// Sliced distances

/// Σ_k |u_(k) − v_(k)|^p over sorted values.
[[nodiscard]] double wasserstein_1d(std::span<const double> u, std::span<const double> v,
                                    int p = 2);

/// Uniform direction on the unit sphere in R^d (normalized Gaussian draw).
[[nodiscard]] Vector random_direction(std::size_t d, Rng& rng);
/// x·ω for every row.
[[nodiscard]] Vector project(const Matrix& x, std::span<const double> direction);

/// (1/k)·Σ_ω W₂²(x·ω, y·ω) over k random directions drawn up front from `rng`.
[[nodiscard]] double sliced_wasserstein(const Matrix& x, const Matrix& y, std::size_t k, Rng& rng);
/// Same value as sliced_wasserstein plus its gradient w.r.t. y.
[[nodiscard]] DistanceReport sliced_wasserstein_grad(const Matrix& x, const Matrix& y,
                                                     std::size_t k, Rng& rng);

struct MaxSlicedResult {
    double value = 0.0;
    Vector direction;
};

/// Best of `k_candidates` random directions, then `ascent_steps` of projected
/// gradient ascent on the sphere. A step is kept only if it improves.
[[nodiscard]] MaxSlicedResult max_sliced_wasserstein(const Matrix& x, const Matrix& y,
                                                     std::size_t k_candidates,
                                                     std::size_t ascent_steps, Rng& rng);
/// Max-sliced value plus its gradient w.r.t. y along the selected direction.
[[nodiscard]] DistanceReport max_sliced_wasserstein_grad(const Matrix& x, const Matrix& y,
                                                         std::size_t k_candidates,
                                                         std::size_t ascent_steps, Rng& rng);

}  // namespace fot
