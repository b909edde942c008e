#include "fot/matsqrt.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fot/error.hpp"

namespace fot {

namespace {

void require_square(const Matrix& a, const char* op) {
    if (!a.is_square()) {
        std::ostringstream msg;
        msg << op << ": expected a square matrix, got " << a.rows() << "x" << a.cols();
        throw ShapeError(msg.str());
    }
}

// Q·diag(w)·Qᵀ
Matrix from_eigenbasis(const Matrix& q, const Vector& w) {
    Matrix scaled = q;
    for (std::size_t i = 0; i < q.rows(); ++i) {
        for (std::size_t k = 0; k < q.cols(); ++k) scaled(i, k) *= w[k];
    }
    Matrix out = matmul(scaled, q.transpose());
    return symmetrize(out);
}

}  // namespace

Matrix eig_sqrt(const SymEig& eig, double scale, double psd_tol) {
    Vector roots(eig.values.size());
    for (std::size_t k = 0; k < roots.size(); ++k) {
        const double lambda = eig.values[k];
        if (lambda < -psd_tol * scale) {
            std::ostringstream msg;
            msg << "eig_sqrt: eigenvalue " << lambda << " (index " << k
                << ") is below the PSD tolerance";
            throw NotPsdError(msg.str());
        }
        roots[k] = std::sqrt(std::max(lambda, 0.0));
    }
    return from_eigenbasis(eig.vectors, roots);
}

Matrix eig_sqrt(const Matrix& a, double psd_tol) {
    require_square(a, "eig_sqrt");
    return eig_sqrt(sym_eig(a), frobenius_norm(a), psd_tol);
}

SqrtResult newton_schulz_sqrt(const Matrix& a, int t, double jitter) {
    require_square(a, "newton_schulz_sqrt");
    if (t < 0) throw DomainError("newton_schulz_sqrt: negative iteration count");
    const std::size_t n = a.rows();
    const double a_norm = frobenius_norm(a);

    Matrix shifted = symmetrize(a);
    for (std::size_t i = 0; i < n; ++i) shifted(i, i) += jitter * a_norm;
    const double s = a_norm + kNormalizationEps;

    Matrix y = shifted * (1.0 / s);
    Matrix z = Matrix::identity(n);
    for (int it = 0; it < t; ++it) {
        // Full products: forcing symmetry here destabilizes near-singular inputs.
        Matrix u = matmul(z, y);
        u *= -0.5;
        for (std::size_t i = 0; i < n; ++i) u(i, i) += 1.5;
        y = matmul(y, u);
        z = matmul(u, z);
        if (!all_finite(y.data()) || !all_finite(z.data())) {
            std::ostringstream msg;
            msg << "newton_schulz_sqrt: non-finite iterate at iteration " << it + 1;
            throw DivergenceError(msg.str(), it + 1);
        }
    }

    SqrtResult out;
    out.y = symmetrize(y) * std::sqrt(s);
    out.z = symmetrize(z) * (1.0 / std::sqrt(s));
    out.iterations_used = t;
    out.residual = a_norm > 0.0 ? frobenius_norm(matmul(out.y, out.y) - a) / a_norm
                                : frobenius_norm(matmul(out.y, out.y));
    return out;
}

Matrix sylvester_grad_eig(const SymEig& b_eig, const Matrix& da) {
    const std::size_t n = b_eig.values.size();
    if (da.rows() != n || da.cols() != n) throw ShapeError("sylvester_grad_eig: da shape mismatch");

    const double lambda_max =
        n == 0 ? 0.0 : *std::max_element(b_eig.values.begin(), b_eig.values.end());
    const double tol = kSingularPairTol * std::max(lambda_max, 0.0);
    const Matrix& q = b_eig.vectors;

    Matrix inner = matmul(matmul_tn(q, da), q);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double denom = b_eig.values[i] + b_eig.values[j];
            if (denom <= tol) {
                std::ostringstream msg;
                msg << "sylvester_grad_eig: singular eigenvalue pair (" << i << ", " << j
                    << "): " << b_eig.values[i] << " + " << b_eig.values[j];
                throw SingularError(msg.str());
            }
            inner(i, j) /= denom;
        }
    }
    return matmul(matmul(q, inner), q.transpose());
}

Matrix sylvester_grad_eig(const Matrix& b, const Matrix& da) {
    require_square(b, "sylvester_grad_eig");
    return sylvester_grad_eig(sym_eig(b), da);
}

Matrix kron_sylvester_solve(const Matrix& b, const Matrix& da) {
    require_square(b, "kron_sylvester_solve");
    const std::size_t n = b.rows();
    if (da.rows() != n || da.cols() != n) throw ShapeError("kron_sylvester_solve: da shape mismatch");
    if (n > 16) throw DomainError("kron_sylvester_solve: dense Kronecker system limited to d <= 16");

    // Column-stacked vec: vec(X)[j·n + i] = X(i, j).
    // vec(X·B) = (Bᵀ ⊗ I)·vec(X),  vec(B·X) = (I ⊗ B)·vec(X).
    const std::size_t m = n * n;
    Matrix op(m, m);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t row = j * n + i;
            for (std::size_t k = 0; k < n; ++k) {
                op(row, k * n + i) += b(k, j);  // (X·B)(i,j) = Σ_k X(i,k)·B(k,j)
                op(row, j * n + k) += b(i, k);  // (B·X)(i,j) = Σ_k B(i,k)·X(k,j)
            }
        }
    }
    Vector rhs(m);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) rhs[j * n + i] = da(i, j);
    }
    const Vector x = solve(std::move(op), std::move(rhs));
    Matrix db(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t i = 0; i < n; ++i) db(i, j) = x[j * n + i];
    }
    return db;
}

}  // namespace fot
