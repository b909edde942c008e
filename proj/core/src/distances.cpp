#include "fot/distances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "fot/error.hpp"
#include "fot/matsqrt.hpp"

namespace fot {

namespace {

using Clock = std::chrono::steady_clock;

void require_same_width(const Matrix& x, const Matrix& y, const char* op) {
    if (x.cols() != y.cols()) {
        std::ostringstream msg;
        msg << op << ": feature widths differ (" << x.cols() << " vs " << y.cols() << ")";
        throw ShapeError(msg.str());
    }
}

void require_paired(const Matrix& x, const Matrix& y, const char* op) {
    require_same_width(x, y, op);
    if (x.rows() != y.rows()) {
        std::ostringstream msg;
        msg << op << ": sample counts differ (" << x.rows() << " vs " << y.rows() << ")";
        throw ShapeError(msg.str());
    }
    if (x.rows() == 0) {
        std::ostringstream msg;
        msg << op << ": empty sample set";
        throw EmptyInputError(msg.str());
    }
}

void require_exponent(int p, const char* op) {
    if (p != 1 && p != 2) {
        std::ostringstream msg;
        msg << op << ": exponent must be 1 or 2, got " << p;
        throw DomainError(msg.str());
    }
}

double clamp_band(double value, double scale) {
    const double band = 1e-8 * std::max(1.0, scale);
    return (value < 0.0 && value >= -band) ? 0.0 : value;
}

Matrix outer_sqrt(const Matrix& m, const SqrtConfig& cfg) {
    if (cfg.method == SqrtMethod::eig) return eig_sqrt(m);
    return newton_schulz_sqrt(m, cfg.iterations, cfg.jitter).y;
}

// Stable argsort so ties resolve by index.
std::vector<std::size_t> sorted_order(std::span<const double> values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&values](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    return order;
}

// W₂² between projections plus ∂/∂(projected y).
double projected_w2(std::span<const double> px, std::span<const double> py, Vector* grad_py) {
    const auto ox = sorted_order(px);
    const auto oy = sorted_order(py);
    std::vector<double> terms(px.size());
    for (std::size_t k = 0; k < px.size(); ++k) {
        const double diff = px[ox[k]] - py[oy[k]];
        terms[k] = diff * diff;
        if (grad_py != nullptr) (*grad_py)[oy[k]] = -2.0 * diff;
    }
    return canonical_sum(std::move(terms));
}

void accumulate_direction_grad(Matrix& grad, std::span<const double> grad_py,
                               std::span<const double> direction, double weight) {
    for (std::size_t i = 0; i < grad.rows(); ++i) {
        const double g = weight * grad_py[i];
        auto row = grad.row(i);
        for (std::size_t c = 0; c < row.size(); ++c) row[c] += g * direction[c];
    }
}

double sliced_objective(const Matrix& x, const Matrix& y, std::span<const double> direction) {
    const Vector px = project(x, direction);
    const Vector py = project(y, direction);
    return projected_w2(px, py, nullptr);
}

}  // namespace

// ---------------------------------------------------------------------------

bool Assignment::is_permutation() const {
    std::vector<bool> seen(perm.size(), false);
    for (std::size_t j : perm) {
        if (j >= perm.size() || seen[j]) return false;
        seen[j] = true;
    }
    return true;
}

std::vector<std::size_t> Assignment::inverse() const {
    std::vector<std::size_t> inv(perm.size());
    for (std::size_t i = 0; i < perm.size(); ++i) inv[perm[i]] = i;
    return inv;
}

// ---------------------------------------------------------------------------

double frechet_distance(const GaussianStats& pd, const GaussianStats& pg, const SqrtConfig& cfg) {
    if (pd.dim() != pg.dim() || pd.cov.rows() != pd.dim() || pg.cov.rows() != pg.dim()) {
        std::ostringstream msg;
        msg << "frechet_distance: dimension mismatch (" << pd.dim() << " vs " << pg.dim() << ")";
        throw ShapeError(msg.str());
    }
    check_psd(pd);
    check_psd(pg);

    double mean_term = 0.0;
    for (std::size_t i = 0; i < pd.dim(); ++i) {
        const double diff = pd.mean[i] - pg.mean[i];
        mean_term += diff * diff;
    }
    const Matrix root_d = eig_sqrt(pd.cov);
    const Matrix inner = symmetrize(matmul(matmul(root_d, pg.cov), root_d));
    const Matrix s = outer_sqrt(inner, cfg);
    const double traces = trace(pd.cov) + trace(pg.cov);
    return clamp_band(mean_term + traces - 2.0 * trace(s), traces);
}

namespace {

// Eigendecomposition of a, warm-started from *basis when one of the right size
// is cached; the result's basis replaces the cache.
SymEig cached_eig(const Matrix& a, std::optional<Matrix>* basis) {
    if (basis == nullptr) return sym_eig(a);
    SymEig eig = basis->has_value() && (*basis)->rows() == a.rows() ? sym_eig(a, **basis) : sym_eig(a);
    *basis = eig.vectors;
    return eig;
}

}  // namespace

FrechetForward frechet_forward(const Matrix& feat_g, const GaussianStats& pd,
                               const SqrtConfig& cfg, FrechetWarmStart* warm) {
    if (feat_g.cols() != pd.dim()) throw ShapeError("frechet_forward: feature width != stats dim");
    FrechetForward fwd;
    fwd.pg = estimate_gaussian(feat_g);
    check_psd(fwd.pg);
    const std::size_t n = feat_g.rows();
    const std::size_t d = feat_g.cols();

    fwd.mean_delta.resize(d);
    double mean_term = 0.0;
    for (std::size_t j = 0; j < d; ++j) {
        fwd.mean_delta[j] = fwd.pg.mean[j] - pd.mean[j];
        mean_term += fwd.mean_delta[j] * fwd.mean_delta[j];
    }
    fwd.centered = feat_g;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < d; ++j) fwd.centered(i, j) -= fwd.pg.mean[j];
    }

    // eig_sqrt throws NotPsdError on a non-PSD Σ_d.
    fwd.root_d = eig_sqrt(cached_eig(pd.cov, warm != nullptr ? &warm->basis_d : nullptr),
                          frobenius_norm(pd.cov));
    const Matrix inner = symmetrize(matmul(matmul(fwd.root_d, fwd.pg.cov), fwd.root_d));
    fwd.sqrt_term = outer_sqrt(inner, cfg);
    const double traces = trace(pd.cov) + trace(fwd.pg.cov);
    fwd.value = clamp_band(mean_term + traces - 2.0 * trace(fwd.sqrt_term), traces);
    return fwd;
}

Matrix frechet_backward(const FrechetForward& fwd, FrechetWarmStart* warm) {
    const std::size_t n = fwd.centered.rows();
    const std::size_t d = fwd.centered.cols();

    // d Tr S = Tr(G·dM) with G solving G·S + S·G = I; then M = R·Σ_g·R.
    const Matrix g = sylvester_grad_eig(
        cached_eig(fwd.sqrt_term, warm != nullptr ? &warm->basis_sqrt : nullptr), Matrix::identity(d));
    Matrix grad_cov = matmul(matmul(fwd.root_d, g), fwd.root_d) * -2.0;
    for (std::size_t i = 0; i < d; ++i) grad_cov(i, i) += 1.0;
    grad_cov = symmetrize(grad_cov);

    // Σ_g = Cᵀ·C/(N−1) and μ_g = mean of rows; the centering term cancels
    // because the rows of C sum to zero.
    Matrix grad = matmul(fwd.centered, grad_cov);
    grad *= 2.0 / static_cast<double>(n - 1);
    const double mean_scale = 2.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        auto row = grad.row(i);
        for (std::size_t j = 0; j < d; ++j) row[j] += mean_scale * fwd.mean_delta[j];
    }
    return grad;
}

DistanceReport frechet_grad(const Matrix& feat_g, const GaussianStats& pd, const SqrtConfig& cfg) {
    const auto start = Clock::now();
    const FrechetForward fwd = frechet_forward(feat_g, pd, cfg);
    DistanceReport report;
    report.value = fwd.value;
    report.grad = frechet_backward(fwd);
    report.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
    return report;
}

// ---------------------------------------------------------------------------

double canonical_sum(std::vector<double> terms) {
    // Exact running sum as non-overlapping partials, then one rounding.
    std::vector<double> partials;
    for (double x : terms) {
        if (!std::isfinite(x)) return std::accumulate(terms.begin(), terms.end(), 0.0);
        std::size_t kept = 0;
        for (double y : partials) {
            if (std::abs(x) < std::abs(y)) std::swap(x, y);
            const double hi = x + y;
            if (!std::isfinite(hi)) return std::accumulate(terms.begin(), terms.end(), 0.0);
            const double lo = y - (hi - x);
            if (lo != 0.0) partials[kept++] = lo;
            x = hi;
        }
        partials.resize(kept);
        partials.push_back(x);
    }
    if (partials.empty()) return 0.0;

    std::size_t k = partials.size() - 1;
    double hi = partials[k];
    double lo = 0.0;
    while (k > 0) {
        const double x = hi;
        const double y = partials[--k];
        hi = x + y;
        lo = y - (hi - x);
        if (lo != 0.0) break;
    }
    // Half-way case: the rest of the partials decide which way to round.
    if (k > 0 && ((lo < 0.0 && partials[k - 1] < 0.0) || (lo > 0.0 && partials[k - 1] > 0.0))) {
        const double y = lo * 2.0;
        const double x = hi + y;
        if (y == x - hi) hi = x;
    }
    return hi;
}

namespace {

// |a − b| as an unevaluated pair hi + lo, exact.
void push_exact_abs_diff(std::vector<double>& terms, double a, double b) {
    const double hi = a - b;
    const double bv = a - hi;
    const double lo = (a - (hi + bv)) + (bv - b);
    const double sign = hi < 0.0 ? -1.0 : 1.0;
    terms.push_back(sign * hi);
    if (lo != 0.0) terms.push_back(sign * lo);
}

}  // namespace

Matrix pairwise_cost(const Matrix& x, const Matrix& y, int p) {
    require_same_width(x, y, "pairwise_cost");
    require_exponent(p, "pairwise_cost");
    Matrix cost(x.rows(), y.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto xi = x.row(i);
        for (std::size_t j = 0; j < y.rows(); ++j) {
            const auto yj = y.row(j);
            double sq = 0.0;
            for (std::size_t c = 0; c < xi.size(); ++c) {
                const double diff = xi[c] - yj[c];
                sq += diff * diff;
            }
            cost(i, j) = p == 2 ? sq : std::sqrt(sq);
        }
    }
    return cost;
}

Assignment solve_assignment(const Matrix& cost) {
    if (!cost.is_square()) throw ShapeError("solve_assignment: cost matrix must be square");
    const std::size_t n = cost.rows();
    if (n == 0) throw EmptyInputError("solve_assignment: empty cost matrix");

    // Shortest augmenting paths with row/column potentials; index 0 is a
    // sentinel column.
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0);
    std::vector<double> v(n + 1, 0.0);
    std::vector<std::size_t> row_of(n + 1, 0);
    std::vector<std::size_t> way(n + 1, 0);
    std::vector<double> minv(n + 1);
    std::vector<char> used(n + 1);

    for (std::size_t i = 1; i <= n; ++i) {
        row_of[0] = i;
        std::size_t col = 0;
        std::fill(minv.begin(), minv.end(), inf);
        std::fill(used.begin(), used.end(), 0);
        do {
            used[col] = 1;
            const std::size_t row = row_of[col];
            double delta = inf;
            std::size_t next = 0;
            const auto cost_row = cost.row(row - 1);
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double reduced = cost_row[j - 1] - u[row] - v[j];
                if (reduced < minv[j]) {
                    minv[j] = reduced;
                    way[j] = col;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    next = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[row_of[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            col = next;
        } while (row_of[col] != 0);
        do {
            const std::size_t prev = way[col];
            row_of[col] = row_of[prev];
            col = prev;
        } while (col != 0);
    }

    Assignment out;
    out.perm.resize(n);
    for (std::size_t j = 1; j <= n; ++j) out.perm[row_of[j] - 1] = j - 1;
    return out;
}

OtResult ot_cost(const Matrix& x, const Matrix& y, int p) {
    require_paired(x, y, "ot_cost");
    const Matrix cost = pairwise_cost(x, y, p);
    OtResult out;
    out.assignment = solve_assignment(cost);
    std::vector<double> terms;
    terms.reserve(2 * x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const std::size_t j = out.assignment.perm[i];
        // In 1D with p = 1 many matchings tie exactly; exact terms make them sum alike.
        if (p == 1 && x.cols() == 1) {
            push_exact_abs_diff(terms, x(i, 0), y(j, 0));
        } else {
            terms.push_back(cost(i, j));
        }
    }
    out.cost = canonical_sum(std::move(terms));
    return out;
}

Matrix ot_grad(const Matrix& x, const Matrix& y, const Assignment& assignment, int p) {
    require_paired(x, y, "ot_grad");
    require_exponent(p, "ot_grad");
    if (assignment.size() != x.rows() || !assignment.is_permutation()) {
        throw DomainError("ot_grad: assignment is not a permutation of the sample indices");
    }
    Matrix grad(y.rows(), y.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const std::size_t j = assignment.perm[i];
        const auto xi = x.row(i);
        const auto yj = y.row(j);
        auto gj = grad.row(j);
        if (p == 2) {
            for (std::size_t c = 0; c < gj.size(); ++c) gj[c] = 2.0 * (yj[c] - xi[c]);
        } else {
            double sq = 0.0;
            for (std::size_t c = 0; c < gj.size(); ++c) sq += (yj[c] - xi[c]) * (yj[c] - xi[c]);
            const double dist = std::sqrt(sq);
            if (dist == 0.0) continue;  // subgradient 0 at coincident points
            for (std::size_t c = 0; c < gj.size(); ++c) gj[c] = (yj[c] - xi[c]) / dist;
        }
    }
    return grad;
}

// ---------------------------------------------------------------------------

double wasserstein_1d(std::span<const double> u, std::span<const double> v, int p) {
    if (u.size() != v.size()) {
        std::ostringstream msg;
        msg << "wasserstein_1d: length mismatch (" << u.size() << " vs " << v.size() << ")";
        throw ShapeError(msg.str());
    }
    require_exponent(p, "wasserstein_1d");
    Vector su(u.begin(), u.end());
    Vector sv(v.begin(), v.end());
    std::sort(su.begin(), su.end());
    std::sort(sv.begin(), sv.end());
    std::vector<double> terms;
    terms.reserve(2 * su.size());
    for (std::size_t k = 0; k < su.size(); ++k) {
        if (p == 2) {
            const double diff = su[k] - sv[k];
            terms.push_back(diff * diff);
        } else {
            push_exact_abs_diff(terms, su[k], sv[k]);
        }
    }
    return canonical_sum(std::move(terms));
}

Vector random_direction(std::size_t d, Rng& rng) {
    if (d == 0) throw DomainError("random_direction: zero dimension");
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector w(d);
    double len = 0.0;
    while (len == 0.0) {
        for (double& c : w) c = normal(rng);
        len = norm(w);
    }
    for (double& c : w) c /= len;
    return w;
}

Vector project(const Matrix& x, std::span<const double> direction) {
    return matvec(x, direction);
}

double sliced_wasserstein(const Matrix& x, const Matrix& y, std::size_t k, Rng& rng) {
    return sliced_wasserstein_grad(x, y, k, rng).value;
}

DistanceReport sliced_wasserstein_grad(const Matrix& x, const Matrix& y, std::size_t k, Rng& rng) {
    require_paired(x, y, "sliced_wasserstein");
    if (k == 0) throw DomainError("sliced_wasserstein: need at least one projection");
    const auto start = Clock::now();

    std::vector<Vector> directions;
    directions.reserve(k);
    for (std::size_t i = 0; i < k; ++i) directions.push_back(random_direction(x.cols(), rng));

    DistanceReport report;
    Matrix grad(y.rows(), y.cols());
    Vector grad_py(y.rows());
    double total = 0.0;
    const double weight = 1.0 / static_cast<double>(k);
    for (const Vector& w : directions) {
        const Vector px = project(x, w);
        const Vector py = project(y, w);
        total += projected_w2(px, py, &grad_py);
        accumulate_direction_grad(grad, grad_py, w, weight);
    }
    report.value = total * weight;
    report.grad = std::move(grad);
    report.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
    return report;
}

MaxSlicedResult max_sliced_wasserstein(const Matrix& x, const Matrix& y, std::size_t k_candidates,
                                       std::size_t ascent_steps, Rng& rng) {
    require_paired(x, y, "max_sliced_wasserstein");
    if (k_candidates == 0) throw DomainError("max_sliced_wasserstein: need at least one candidate");

    MaxSlicedResult best;
    best.value = -1.0;
    for (std::size_t i = 0; i < k_candidates; ++i) {
        Vector w = random_direction(x.cols(), rng);
        const double value = sliced_objective(x, y, w);
        if (value > best.value) {
            best.value = value;
            best.direction = std::move(w);
        }
    }

    // For a fixed sorted pairing the objective is ωᵀHω with H = Σ ΔΔᵀ, so
    // ω + Hω/(ωᵀHω) is an ascent step along the gradient 2Hω.
    Vector grad_py(y.rows());
    for (std::size_t step = 0; step < ascent_steps && best.value > 0.0; ++step) {
        const Vector px = project(x, best.direction);
        const Vector py = project(y, best.direction);
        const auto ox = sorted_order(px);
        const auto oy = sorted_order(py);
        Vector h_w(x.cols(), 0.0);
        for (std::size_t k = 0; k < ox.size(); ++k) {
            const double along = px[ox[k]] - py[oy[k]];
            const auto xi = x.row(ox[k]);
            const auto yj = y.row(oy[k]);
            for (std::size_t c = 0; c < h_w.size(); ++c) h_w[c] += along * (xi[c] - yj[c]);
        }
        Vector candidate = best.direction;
        for (std::size_t c = 0; c < candidate.size(); ++c) candidate[c] += h_w[c] / best.value;
        const double len = norm(candidate);
        if (len == 0.0) break;
        for (double& c : candidate) c /= len;
        const double value = sliced_objective(x, y, candidate);
        if (!(value > best.value)) break;
        best.value = value;
        best.direction = std::move(candidate);
    }
    best.value = std::max(best.value, 0.0);
    return best;
}

DistanceReport max_sliced_wasserstein_grad(const Matrix& x, const Matrix& y,
                                           std::size_t k_candidates, std::size_t ascent_steps,
                                           Rng& rng) {
    const auto start = Clock::now();
    const MaxSlicedResult best = max_sliced_wasserstein(x, y, k_candidates, ascent_steps, rng);
    const Vector px = project(x, best.direction);
    const Vector py = project(y, best.direction);
    Vector grad_py(y.rows());
    DistanceReport report;
    report.value = projected_w2(px, py, &grad_py);
    Matrix grad(y.rows(), y.cols());
    accumulate_direction_grad(grad, grad_py, best.direction, 1.0);
    report.grad = std::move(grad);
    report.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
    return report;
}

}  // namespace fot
