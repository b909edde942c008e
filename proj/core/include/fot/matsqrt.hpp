#pragma once

#include "fot/linalg.hpp"

namespace fot {

/// Output of the coupled Newton-Schulz iteration.
struct SqrtResult {
    Matrix y;                ///< ≈ A^{1/2}
    Matrix z;                ///< ≈ A^{-1/2} (of the jittered input)
    int iterations_used = 0;
    double residual = 0.0;   ///< ‖y² − A‖_F / ‖A‖_F
};

inline constexpr double kDefaultJitter = 1e-10;
inline constexpr double kNormalizationEps = 1e-12;
/// Relative tolerance for the Sylvester eigenvalue-pair check.
inline constexpr double kSingularPairTol = 1e-12;
/// Relative tolerance below which negative eigenvalues are treated as roundoff.
inline constexpr double kPsdTol = 1e-10;

/// Principal square root Q·√Λ·Qᵀ of a symmetric PSD matrix. Eigenvalues in
/// [−psd_tol·‖a‖_F, 0) are clamped to zero; anything more negative raises
/// NotPsdError.
[[nodiscard]] Matrix eig_sqrt(const Matrix& a, double psd_tol = kPsdTol);

/// Principal square root from its eigendecomposition (same clamping rule).
[[nodiscard]] Matrix eig_sqrt(const SymEig& eig, double scale, double psd_tol = kPsdTol);

/// Newton-Schulz iteration for A^{1/2} and A^{-1/2}.
///
/// The input is shifted by jitter·‖a‖_F·I and divided by s = ‖a‖_F + ε so
/// the iteration starts inside its convergence region, then `t` steps of
///     U = ½(3I − Z·Y),  Y ← Y·U,  Z ← U·Z
/// are run from Y = a', Z = I. Outputs are rescaled by √s and 1/√s.
/// Throws DivergenceError if NaN/Inf appears.
[[nodiscard]] SqrtResult newton_schulz_sqrt(const Matrix& a, int t,
                                            double jitter = kDefaultJitter);

/// Solves dB·b + b·dB = da for symmetric PSD b in b's eigenbasis:
/// dB = Q·[(Qᵀ·da·Q)_ij / (λ_i + λ_j)]·Qᵀ.
/// Throws SingularError if any λ_i + λ_j ≤ 1e-12·max λ.
[[nodiscard]] Matrix sylvester_grad_eig(const Matrix& b, const Matrix& da);
[[nodiscard]] Matrix sylvester_grad_eig(const SymEig& b_eig, const Matrix& da);

/// Dense reference solver for the same equation: builds the d²×d² operator
/// (bᵀ ⊗ I + I ⊗ b) and solves for vec(dB). Limited to d ≤ 16.
[[nodiscard]] Matrix kron_sylvester_solve(const Matrix& b, const Matrix& da);

}  // namespace fot
