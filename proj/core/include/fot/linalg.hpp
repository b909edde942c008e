#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace fot {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
    /// Takes ownership of row-major `data`; throws ShapeError on a length
    /// mismatch and DomainError on non-finite entries.
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

    static Matrix identity(std::size_t n);
    static Matrix diagonal(std::span<const double> diag);
    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }
    [[nodiscard]] bool is_square() const noexcept { return rows_ == cols_; }

    double& operator()(std::size_t i, std::size_t j) noexcept { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

    [[nodiscard]] std::span<double> row(std::size_t i) noexcept {
        return {data_.data() + i * cols_, cols_};
    }
    [[nodiscard]] std::span<const double> row(std::size_t i) const noexcept {
        return {data_.data() + i * cols_, cols_};
    }

    [[nodiscard]] std::span<double> data() noexcept { return data_; }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }

    [[nodiscard]] Matrix transpose() const;
    [[nodiscard]] Vector diag() const;

    Matrix& operator+=(const Matrix& other);
    Matrix& operator-=(const Matrix& other);
    Matrix& operator*=(double s) noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

Matrix operator+(Matrix a, const Matrix& b);
Matrix operator-(Matrix a, const Matrix& b);
Matrix operator*(Matrix a, double s);
Matrix operator*(double s, Matrix a);

/// a·b. Throws ShapeError unless a.cols() == b.rows().
[[nodiscard]] Matrix matmul(const Matrix& a, const Matrix& b);
/// aᵀ·b without materializing the transpose.
[[nodiscard]] Matrix matmul_tn(const Matrix& a, const Matrix& b);
[[nodiscard]] Vector matvec(const Matrix& a, std::span<const double> x);

[[nodiscard]] double trace(const Matrix& a);
[[nodiscard]] double frobenius_norm(const Matrix& a) noexcept;
[[nodiscard]] double dot(std::span<const double> a, std::span<const double> b);
[[nodiscard]] double norm(std::span<const double> a) noexcept;

/// (a + aᵀ)/2.
[[nodiscard]] Matrix symmetrize(const Matrix& a);
[[nodiscard]] bool all_finite(std::span<const double> values) noexcept;

/// Eigendecomposition a = Q·diag(values)·Qᵀ of a symmetric matrix.
struct SymEig {
    Vector values;  ///< ascending
    Matrix vectors; ///< column k pairs with values[k]
};

inline constexpr double kDefaultSymmetryTol = 1e-9;
inline constexpr int kDefaultMaxSweeps = 100;

/// Cyclic Jacobi eigendecomposition.
///
/// The input must be symmetric to within `tol`·‖a‖_F entrywise (DomainError
/// otherwise). It is symmetrized before iterating. Sweeps continue until the
/// off-diagonal Frobenius mass drops to machine precision relative to ‖a‖_F;
/// ConvergenceError is raised after `max_sweeps` sweeps. Eigenvalues come
/// back ascending, ties keep their Jacobi order.
[[nodiscard]] SymEig sym_eig(const Matrix& a, double tol = kDefaultSymmetryTol,
                             int max_sweeps = kDefaultMaxSweeps);

/// Same decomposition, with Jacobi started from the orthogonal `basis`
/// (typically the eigenvectors of a nearby matrix) instead of the identity.
[[nodiscard]] SymEig sym_eig(const Matrix& a, const Matrix& basis,
                             double tol = kDefaultSymmetryTol, int max_sweeps = kDefaultMaxSweeps);

/// Q·diag(values)·Qᵀ.
[[nodiscard]] Matrix reconstruct(const SymEig& eig);

/// Solves a·x = b by Gaussian elimination with partial pivoting. Throws
/// SingularError when a pivot falls below `pivot_tol`·max|a|.
[[nodiscard]] Vector solve(Matrix a, Vector b, double pivot_tol = 1e-13);

}  // namespace fot
