#include "fot/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>

#include "fot/error.hpp"
#include "simd.hpp"

namespace fot {

namespace {

void require_same_shape(const Matrix& a, const Matrix& b, const char* op) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        std::ostringstream msg;
        msg << op << ": shape mismatch " << a.rows() << "x" << a.cols() << " vs " << b.rows()
            << "x" << b.cols();
        throw ShapeError(msg.str());
    }
}

double off_diagonal_norm(const Matrix& a) {
    double sum = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (i != j) sum += a(i, j) * a(i, j);
        }
    }
    return std::sqrt(sum);
}


struct Rotation {
    std::size_t p;
    std::size_t r;
    double c;
    double s;
    double t;
};

// Applies rows p, r <- (c·p − s·r, s·p + c·r) for every rotation in the round.
FOT_SIMD_CLONES
void rotate_rows(Matrix& m, const std::vector<Rotation>& round) {
    const std::size_t n = m.cols();
    for (const Rotation& rot : round) {
        double* __restrict row_p = m.row(rot.p).data();
        double* __restrict row_r = m.row(rot.r).data();
        const double c = rot.c;
        const double s = rot.s;
        for (std::size_t k = 0; k < n; ++k) {
            const double x = row_p[k];
            const double y = row_r[k];
            row_p[k] = c * x - s * y;
            row_r[k] = s * x + c * y;
        }
    }
}

// Columns p, r <- (c·p − s·r, s·p + c·r). Walking row by row keeps the access
// contiguous; the pairs in a round are disjoint so their order does not matter.
FOT_SIMD_CLONES
void rotate_columns(Matrix& m, const std::vector<Rotation>& round) {
    for (std::size_t k = 0; k < m.rows(); ++k) {
        double* __restrict row = m.row(k).data();
        for (const Rotation& rot : round) {
            const double x = row[rot.p];
            const double y = row[rot.r];
            row[rot.p] = rot.c * x - rot.s * y;
            row[rot.r] = rot.s * x + rot.c * y;
        }
    }
}

FOT_SIMD_CLONES
void transpose_in_place(Matrix& m) {
    const std::size_t n = m.rows();
    constexpr std::size_t kBlock = 32;
    for (std::size_t ib = 0; ib < n; ib += kBlock) {
        for (std::size_t jb = ib; jb < n; jb += kBlock) {
            const std::size_t i_end = std::min(ib + kBlock, n);
            const std::size_t j_end = std::min(jb + kBlock, n);
            for (std::size_t i = ib; i < i_end; ++i) {
                for (std::size_t j = (ib == jb ? i + 1 : jb); j < j_end; ++j) {
                    std::swap(m(i, j), m(j, i));
                }
            }
        }
    }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows * cols) {
        std::ostringstream msg;
        msg << "Matrix: data length " << data_.size() << " != " << rows << "x" << cols;
        throw ShapeError(msg.str());
    }
    if (!all_finite(data_)) throw DomainError("Matrix: non-finite entry");
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
}

Matrix Matrix::diagonal(std::span<const double> diag) {
    Matrix m(diag.size(), diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) m(i, i) = diag[i];
    return m;
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t r = rows.size();
    const std::size_t c = r == 0 ? 0 : rows.begin()->size();
    std::vector<double> data;
    data.reserve(r * c);
    for (const auto& row : rows) {
        if (row.size() != c) throw ShapeError("Matrix::from_rows: ragged rows");
        data.insert(data.end(), row.begin(), row.end());
    }
    return Matrix(r, c, std::move(data));
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
    }
    return t;
}

Vector Matrix::diag() const {
    const std::size_t n = std::min(rows_, cols_);
    Vector d(n);
    for (std::size_t i = 0; i < n; ++i) d[i] = (*this)(i, i);
    return d;
}

Matrix& Matrix::operator+=(const Matrix& other) {
    require_same_shape(*this, other, "operator+=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] += other.data_[k];
    return *this;
}

Matrix& Matrix::operator-=(const Matrix& other) {
    require_same_shape(*this, other, "operator-=");
    for (std::size_t k = 0; k < data_.size(); ++k) data_[k] -= other.data_[k];
    return *this;
}

Matrix& Matrix::operator*=(double s) noexcept {
    for (double& v : data_) v *= s;
    return *this;
}

Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
Matrix operator*(Matrix a, double s) { return a *= s; }
Matrix operator*(double s, Matrix a) { return a *= s; }

namespace {

FOT_SIMD_CLONES
Matrix tiled_product(const Matrix& a, const Matrix& b) {
    const std::size_t m = a.rows();
    const std::size_t inner = a.cols();
    const std::size_t n = b.cols();
    Matrix c(m, n);
    // 4x4 register tiles over a packed 4-row panel of a; leftovers take the plain loop.
    const std::size_t m4 = m - m % 4;
    const std::size_t n4 = n - n % 4;
    std::vector<double> panel(4 * inner);
    for (std::size_t i = 0; i < m4; i += 4) {
        for (std::size_t k = 0; k < inner; ++k) {
            for (std::size_t r = 0; r < 4; ++r) panel[4 * k + r] = a(i + r, k);
        }
        for (std::size_t j = 0; j < n4; j += 4) {
            double acc[4][4] = {};
            const double* ap = panel.data();
            const double* bp = b.data().data() + j;
            for (std::size_t k = 0; k < inner; ++k, ap += 4, bp += n) {
                for (std::size_t r = 0; r < 4; ++r) {
                    for (std::size_t q = 0; q < 4; ++q) acc[r][q] += ap[r] * bp[q];
                }
            }
            for (std::size_t r = 0; r < 4; ++r) {
                for (std::size_t q = 0; q < 4; ++q) c(i + r, j + q) = acc[r][q];
            }
        }
        for (std::size_t r = 0; r < 4; ++r) {
            for (std::size_t j = n4; j < n; ++j) {
                double sum = 0.0;
                for (std::size_t k = 0; k < inner; ++k) sum += a(i + r, k) * b(k, j);
                c(i + r, j) = sum;
            }
        }
    }
    for (std::size_t i = m4; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            double sum = 0.0;
            for (std::size_t k = 0; k < inner; ++k) sum += a(i, k) * b(k, j);
            c(i, j) = sum;
        }
    }
    return c;
}

}  // namespace

Matrix matmul(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        std::ostringstream msg;
        msg << "matmul: inner dimensions differ (" << a.rows() << "x" << a.cols() << " * "
            << b.rows() << "x" << b.cols() << ")";
        throw ShapeError(msg.str());
    }
    return tiled_product(a, b);
}

FOT_SIMD_CLONES
Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows()) throw ShapeError("matmul_tn: row counts differ");
    Matrix c(a.cols(), b.cols());
    const std::size_t n = b.cols();
    for (std::size_t k = 0; k < a.rows(); ++k) {
        const double* bk = b.row(k).data();
        for (std::size_t i = 0; i < a.cols(); ++i) {
            const double aki = a(k, i);
            if (aki == 0.0) continue;
            double* ci = c.row(i).data();
            for (std::size_t j = 0; j < n; ++j) ci[j] += aki * bk[j];
        }
    }
    return c;
}

Vector matvec(const Matrix& a, std::span<const double> x) {
    if (a.cols() != x.size()) throw ShapeError("matvec: dimension mismatch");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) y[i] = dot(a.row(i), x);
    return y;
}

double trace(const Matrix& a) {
    if (!a.is_square()) throw ShapeError("trace: matrix is not square");
    double t = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) t += a(i, i);
    return t;
}

double frobenius_norm(const Matrix& a) noexcept { return norm(a.data()); }

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw ShapeError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm(std::span<const double> a) noexcept {
    double s = 0.0;
    for (double v : a) s += v * v;
    return std::sqrt(s);
}

Matrix symmetrize(const Matrix& a) {
    if (!a.is_square()) throw ShapeError("symmetrize: matrix is not square");
    Matrix s(a.rows(), a.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        s(i, i) = a(i, i);
        for (std::size_t j = i + 1; j < a.cols(); ++j) {
            const double v = 0.5 * (a(i, j) + a(j, i));
            s(i, j) = v;
            s(j, i) = v;
        }
    }
    return s;
}

bool all_finite(std::span<const double> values) noexcept {
    return std::all_of(values.begin(), values.end(), [](double v) { return std::isfinite(v); });
}

namespace {

void require_symmetric(const Matrix& input, double tol, double scale, const char* who) {
    if (!input.is_square()) throw ShapeError(std::string(who) + ": matrix is not square");
    if (!all_finite(input.data())) throw DomainError(std::string(who) + ": non-finite entry");
    const std::size_t n = input.rows();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (std::abs(input(i, j) - input(j, i)) > tol * scale) {
                std::ostringstream msg;
                msg << who << ": asymmetric input at (" << i << "," << j << ")";
                throw DomainError(msg.str());
            }
        }
    }
}

struct Diagonalized {
    Vector values;  // unsorted
    Matrix vt;      // row k is the eigenvector for values[k]
};

// Jacobi on a, accumulating rotations into the rows of vt.
Diagonalized jacobi(Matrix a, Matrix vt, double scale, int max_sweeps) {
    const std::size_t n = a.rows();
    const double target = std::numeric_limits<double>::epsilon() * scale;
    const double negligible = target / static_cast<double>(std::max<std::size_t>(n, 1));

    // Round-robin pair schedule: each round holds disjoint pairs, so its rotations
    // commute and are applied together as row passes on a and on aᵀ.
    const std::size_t slots = n + (n % 2);
    std::vector<std::size_t> ring(slots);
    std::iota(ring.begin(), ring.end(), std::size_t{0});
    std::vector<Rotation> round;
    round.reserve(slots / 2);

    int sweep = 0;
    for (;; ++sweep) {
        const double off = off_diagonal_norm(a);
        if (off == 0.0 || off <= target) break;
        if (sweep >= max_sweeps) {
            std::ostringstream msg;
            msg << "sym_eig: no convergence after " << max_sweeps
                << " sweeps (off-diagonal norm " << off << ")";
            throw ConvergenceError(msg.str());
        }
        // Early sweeps skip small pivots; they are picked up once the large ones are gone.
        double threshold = 0.0;
        if (sweep < 3) {
            double off_sum = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = i + 1; j < n; ++j) off_sum += std::abs(a(i, j));
            }
            threshold = 0.2 * off_sum / static_cast<double>(n * n);
        }
        for (std::size_t step = 0; step + 1 < slots; ++step) {
            round.clear();
            for (std::size_t k = 0; k < slots / 2; ++k) {
                std::size_t p = ring[k];
                std::size_t r = ring[slots - 1 - k];
                if (p >= n || r >= n) continue;
                if (p > r) std::swap(p, r);
                const double apq = a(p, r);
                if (apq == 0.0) continue;
                const double app = a(p, p);
                const double aqq = a(r, r);
                // Rotation is below roundoff of both diagonals after a few sweeps.
                const double g = 100.0 * std::abs(apq);
                if (sweep > 3 && std::abs(app) + g == std::abs(app) &&
                    std::abs(aqq) + g == std::abs(aqq)) {
                    a(p, r) = 0.0;
                    a(r, p) = 0.0;
                    continue;
                }
                // Entries this small cannot move the result above the target accuracy.
                if (std::abs(apq) <= negligible) {
                    a(p, r) = 0.0;
                    a(r, p) = 0.0;
                    continue;
                }
                if (std::abs(apq) <= threshold) continue;
                const double theta = (aqq - app) / (2.0 * apq);
                double t;
                if (std::abs(theta) > 1e150) {
                    t = 0.5 / theta;
                } else {
                    t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                    if (theta < 0.0) t = -t;
                }
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                round.push_back({p, r, c, t * c, t});
            }
            std::rotate(ring.begin() + 1, ring.end() - 1, ring.end());
            if (round.empty()) continue;

            std::vector<double> diag_p(round.size());
            std::vector<double> diag_r(round.size());
            for (std::size_t k = 0; k < round.size(); ++k) {
                const Rotation& rot = round[k];
                const double apq = a(rot.p, rot.r);
                diag_p[k] = a(rot.p, rot.p) - rot.t * apq;
                diag_r[k] = a(rot.r, rot.r) + rot.t * apq;
            }
            rotate_rows(a, round);
            // Sparse rounds are common late in the iteration; a full transpose
            // would dominate them.
            if (4 * round.size() < n) {
                rotate_columns(a, round);
            } else {
                transpose_in_place(a);
                rotate_rows(a, round);
            }
            for (std::size_t k = 0; k < round.size(); ++k) {
                const Rotation& rot = round[k];
                a(rot.p, rot.p) = diag_p[k];
                a(rot.r, rot.r) = diag_r[k];
                a(rot.p, rot.r) = 0.0;
                a(rot.r, rot.p) = 0.0;
            }
            rotate_rows(vt, round);
        }
    }

    return {a.diag(), std::move(vt)};
}

SymEig sorted(const Diagonalized& d) {
    const std::size_t n = d.values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&d](std::size_t i, std::size_t j) { return d.values[i] < d.values[j]; });

    SymEig out{Vector(n), Matrix(n, n)};
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = d.values[order[k]];
        const auto v = d.vt.row(order[k]);
        for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = v[i];
    }
    return out;
}

// A row with no off-diagonal entries is already an eigenpair (e_i, a_ii),
// which is common for covariances of dead ReLU units. Jacobi runs only on the
// coupled block. A basis is used for warm starting when exactly that many of
// its columns live on the coupled coordinates.
SymEig deflated_eig(const Matrix& a, const Matrix* basis, double scale, int max_sweeps) {
    const std::size_t n = a.rows();
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < n; ++i) {
        const auto row = a.row(i);
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i && row[j] != 0.0) {
                active.push_back(i);
                break;
            }
        }
    }
    const std::size_t m = active.size();
    Matrix sub(m, m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) sub(i, j) = a(active[i], active[j]);
    }

    Matrix start_vt = Matrix::identity(m);
    if (basis != nullptr && m > 0) {
        std::vector<bool> is_active(n, false);
        for (std::size_t i : active) is_active[i] = true;
        std::vector<std::size_t> cols;
        for (std::size_t c = 0; c < n; ++c) {
            bool inside = true;
            for (std::size_t i = 0; i < n && inside; ++i) inside = is_active[i] || (*basis)(i, c) == 0.0;
            if (inside) cols.push_back(c);
        }
        if (cols.size() == m) {
            Matrix b(m, m);
            for (std::size_t i = 0; i < m; ++i) {
                for (std::size_t k = 0; k < m; ++k) b(i, k) = (*basis)(active[i], cols[k]);
            }
            sub = symmetrize(matmul_tn(b, matmul(sub, b)));
            start_vt = b.transpose();
        }
    }

    const Diagonalized inner = m > 0 ? jacobi(std::move(sub), std::move(start_vt), scale, max_sweeps)
                                     : Diagonalized{};
    Diagonalized full{a.diag(), Matrix::identity(n)};
    for (std::size_t k = 0; k < m; ++k) {
        const std::size_t r = active[k];
        full.values[r] = inner.values[k];
        full.vt(r, r) = 0.0;
        for (std::size_t j = 0; j < m; ++j) full.vt(r, active[j]) = inner.vt(k, j);
    }
    return sorted(full);
}

}  // namespace

SymEig sym_eig(const Matrix& input, double tol, int max_sweeps) {
    const double scale = frobenius_norm(input);
    require_symmetric(input, tol, scale, "sym_eig");
    return deflated_eig(symmetrize(input), nullptr, scale, max_sweeps);
}

SymEig sym_eig(const Matrix& input, const Matrix& basis, double tol, int max_sweeps) {
    const double scale = frobenius_norm(input);
    require_symmetric(input, tol, scale, "sym_eig");
    if (basis.rows() != input.rows() || basis.cols() != input.rows()) {
        throw ShapeError("sym_eig: basis does not match the matrix");
    }
    return deflated_eig(symmetrize(input), &basis, scale, max_sweeps);
}

Matrix reconstruct(const SymEig& eig) {
    const std::size_t n = eig.values.size();
    Matrix scaled = eig.vectors;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < n; ++k) scaled(i, k) *= eig.values[k];
    }
    return matmul(scaled, eig.vectors.transpose());
}

Vector solve(Matrix a, Vector b, double pivot_tol) {
    if (!a.is_square() || a.rows() != b.size()) throw ShapeError("solve: dimension mismatch");
    const std::size_t n = a.rows();
    double max_abs = 0.0;
    for (double v : a.data()) max_abs = std::max(max_abs, std::abs(v));
    if (max_abs == 0.0) throw SingularError("solve: zero matrix");
    const double threshold = pivot_tol * max_abs;

    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < n; ++r) {
            if (std::abs(a(r, col)) > std::abs(a(pivot, col))) pivot = r;
        }
        if (std::abs(a(pivot, col)) <= threshold) {
            std::ostringstream msg;
            msg << "solve: numerically singular at column " << col;
            throw SingularError(msg.str());
        }
        if (pivot != col) {
            std::swap_ranges(a.row(col).begin(), a.row(col).end(), a.row(pivot).begin());
            std::swap(b[col], b[pivot]);
        }
        const double inv = 1.0 / a(col, col);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = a(r, col) * inv;
            if (f == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) a(r, c) -= f * a(col, c);
            b[r] -= f * b[col];
        }
    }
    Vector x(n);
    for (std::size_t i = n; i-- > 0;) {
        double s = b[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= a(i, c) * x[c];
        x[i] = s / a(i, i);
    }
    return x;
}

}  // namespace fot
