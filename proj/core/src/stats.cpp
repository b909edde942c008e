#include "fot/stats.hpp"

#include <cmath>
#include <sstream>

#include "fot/error.hpp"
#include "fot/matsqrt.hpp"

namespace fot {

GaussianStats estimate_gaussian(const Matrix& samples) {
    const std::size_t n = samples.rows();
    const std::size_t d = samples.cols();
    if (n < 2) {
        std::ostringstream msg;
        msg << "estimate_gaussian: need at least 2 samples, got " << n;
        throw InsufficientSamplesError(msg.str());
    }
    if (!all_finite(samples.data())) throw DomainError("estimate_gaussian: non-finite sample");

    GaussianStats out{Vector(d, 0.0), Matrix(d, d)};
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) out.mean[j] += samples(i, j);
    }
    for (double& m : out.mean) m /= static_cast<double>(n);

    Matrix centered = samples;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) centered(i, j) -= out.mean[j];
    }
    out.cov = symmetrize(matmul_tn(centered, centered));
    out.cov *= 1.0 / static_cast<double>(n - 1);
    return out;
}

namespace {

// Cholesky of cov + shift·I; success certifies every eigenvalue exceeds −shift.
bool shifted_cholesky_succeeds(const Matrix& cov, double shift) {
    const std::size_t n = cov.rows();
    Matrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double diag = cov(j, j) + shift;
        const auto lj = l.row(j);
        for (std::size_t k = 0; k < j; ++k) diag -= lj[k] * lj[k];
        if (!(diag > 0.0)) return false;
        const double root = std::sqrt(diag);
        lj[j] = root;
        for (std::size_t i = j + 1; i < n; ++i) {
            const auto li = l.row(i);
            double v = cov(i, j);
            for (std::size_t k = 0; k < j; ++k) v -= li[k] * lj[k];
            li[j] = v / root;
        }
    }
    return true;
}

}  // namespace

void check_psd(const GaussianStats& stats) {
    const Matrix& cov = stats.cov;
    if (!cov.is_square() || cov.rows() != stats.mean.size()) {
        throw ShapeError("check_psd: covariance shape does not match mean");
    }
    const double scale = frobenius_norm(cov);
    for (std::size_t i = 0; i < cov.rows(); ++i) {
        for (std::size_t j = i + 1; j < cov.cols(); ++j) {
            if (std::abs(cov(i, j) - cov(j, i)) > 1e-12 * scale) {
                throw NotPsdError("check_psd: covariance is not symmetric");
            }
        }
    }
    if (shifted_cholesky_succeeds(cov, kPsdTol * scale)) return;
    // Slow path: the eigenvalues decide, and name the offending one.
    const SymEig eig = sym_eig(cov);
    if (!eig.values.empty() && eig.values.front() < -kPsdTol * scale) {
        std::ostringstream msg;
        msg << "check_psd: smallest eigenvalue " << eig.values.front() << " violates PSD";
        throw NotPsdError(msg.str());
    }
}

}  // namespace fot
