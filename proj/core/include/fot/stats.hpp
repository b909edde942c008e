#pragma once

#include "fot/linalg.hpp"

namespace fot {

/// Mean and covariance of a batch of feature vectors.
struct GaussianStats {
    Vector mean;
    Matrix cov;

    [[nodiscard]] std::size_t dim() const noexcept { return mean.size(); }
};

/// Column means and unbiased (N−1) covariance of an N×d sample matrix. The
/// covariance is symmetrized explicitly. Requires N ≥ 2 and finite entries.
[[nodiscard]] GaussianStats estimate_gaussian(const Matrix& samples);

/// Throws NotPsdError unless `stats.cov` is symmetric within 1e-12 relative
/// and its smallest eigenvalue is ≥ −1e-10·‖cov‖_F.
void check_psd(const GaussianStats& stats);

}  // namespace fot
