#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fot/distances.hpp"
#include "fot/error.hpp"
#include "fot/matsqrt.hpp"
#include "oracles.hpp"

using namespace fot;

namespace {

GaussianStats stats_of(Vector mean, Matrix cov) { return GaussianStats{std::move(mean), std::move(cov)}; }

GaussianStats random_stats(std::size_t d, oracle::Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Vector mean(d);
    for (double& m : mean) m = normal(rng);
    return stats_of(mean, oracle::random_psd(d, rng, 0.05, 5.0).a);
}

Matrix shuffled_rows(const Matrix& x, oracle::Rng& rng) {
    std::vector<std::size_t> order(x.rows());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);
    Matrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        for (std::size_t c = 0; c < x.cols(); ++c) out(i, c) = x(order[i], c);
    }
    return out;
}

Matrix column(const Vector& v) {
    Matrix m(v.size(), 1);
    for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
    return m;
}

}  // namespace

TEST_SUITE("distances") {

// --- Fréchet -----------------------------------------------------------------

TEST_CASE("Fréchet analytic cases") {
    for (SqrtMethod method : {SqrtMethod::eig, SqrtMethod::newton_schulz}) {
        const SqrtConfig cfg{method, 15, 1e-10};
        oracle::Rng rng(50);
        const GaussianStats s = random_stats(5, rng);
        CHECK(std::abs(frechet_distance(s, s, cfg)) <= 1e-8);

        const GaussianStats a = stats_of({0.0}, Matrix::from_rows({{1.0}}));
        const GaussianStats b = stats_of({1.0}, Matrix::from_rows({{4.0}}));
        CHECK(std::abs(frechet_distance(a, b, cfg) - 2.0) <= 1e-8);

        const GaussianStats c = stats_of({1.0, 0.0}, Matrix::identity(2));
        const GaussianStats d = stats_of({0.0, 0.0}, Matrix::diagonal(std::vector<double>{4, 9}));
        CHECK(std::abs(frechet_distance(c, d, cfg) - 6.0) <= 1e-8);
    }
}

TEST_CASE("Fréchet equals the closed form for commuting covariances") {
    oracle::Rng rng(51);
    const Matrix q = oracle::random_orthogonal(4, rng);
    const Vector l1{0.5, 1.0, 2.0, 3.0};
    const Vector l2{4.0, 0.25, 1.0, 9.0};
    const GaussianStats a = stats_of({0, 0, 0, 0}, oracle::from_spectrum(q, l1));
    const GaussianStats b = stats_of({1, 1, 0, 0}, oracle::from_spectrum(q, l2));
    double expected = 2.0;
    for (std::size_t i = 0; i < 4; ++i) {
        const double diff = std::sqrt(l1[i]) - std::sqrt(l2[i]);
        expected += diff * diff;
    }
    CHECK(frechet_distance(a, b, {SqrtMethod::eig}) == doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("Fréchet is symmetric and nonnegative") {
    oracle::Rng rng(52);
    for (int trial = 0; trial < 20; ++trial) {
        const GaussianStats a = random_stats(6, rng);
        const GaussianStats b = random_stats(6, rng);
        const double ab = frechet_distance(a, b, {SqrtMethod::eig});
        const double ba = frechet_distance(b, a, {SqrtMethod::eig});
        CHECK(ab >= 0.0);
        CHECK(std::abs(ab - ba) <= 1e-8 * std::max(1.0, ab));
        const double ns = frechet_distance(a, b);
        CHECK(std::abs(ns - ab) <= 1e-6 * std::max(1.0, ab));
    }
}

TEST_CASE("Fréchet trace term does not depend on which root is taken outside") {
    oracle::Rng rng(53);
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix sd = oracle::random_psd(5, rng).a;
        const Matrix sg = oracle::random_psd(5, rng).a;
        auto trace_term = [](const Matrix& outer, const Matrix& inner) {
            const Matrix r = eig_sqrt(outer);
            return trace(eig_sqrt(symmetrize(oracle::triple_loop_matmul(oracle::triple_loop_matmul(r, inner), r))));
        };
        const double t1 = trace_term(sd, sg);
        const double t2 = trace_term(sg, sd);
        CHECK(std::abs(t1 - t2) <= 1e-8 * std::abs(t1));
    }
}

TEST_CASE("Fréchet errors") {
    const GaussianStats a = stats_of({0.0, 0.0}, Matrix::identity(2));
    const GaussianStats b = stats_of({0.0}, Matrix::identity(1));
    CHECK_THROWS_AS((void)frechet_distance(a, b), ShapeError);
    const GaussianStats bad = stats_of({0.0, 0.0}, Matrix::diagonal(std::vector<double>{1, -1}));
    CHECK_THROWS_AS((void)frechet_distance(a, bad), NotPsdError);
    CHECK_THROWS_AS((void)frechet_distance(bad, a), NotPsdError);
    CHECK_THROWS_AS((void)frechet_grad(Matrix(1, 2), a), InsufficientSamplesError);
    CHECK_THROWS_AS((void)frechet_grad(Matrix(4, 3), a), ShapeError);
}

TEST_CASE("frechet_grad value matches frechet_distance of the batch estimate") {
    oracle::Rng rng(54);
    const GaussianStats pd = random_stats(4, rng);
    const Matrix feat = oracle::gaussian_matrix(30, 4, rng);
    const DistanceReport r = frechet_grad(feat, pd);
    CHECK(r.value == doctest::Approx(frechet_distance(pd, estimate_gaussian(feat))).epsilon(1e-12));
    REQUIRE(r.grad.has_value());
    CHECK(r.grad->rows() == 30);
    CHECK(r.grad->cols() == 4);
    CHECK(r.elapsed.count() >= 0);
}

TEST_CASE("warm-started Fréchet passes match cold ones") {
    oracle::Rng rng(57);
    FrechetWarmStart warm;
    Matrix real = oracle::gaussian_matrix(64, 6, rng, 1.2, 0.4);
    Matrix feat = oracle::gaussian_matrix(32, 6, rng);
    for (int step = 0; step < 6; ++step) {
        const Matrix drift_r = oracle::gaussian_matrix(64, 6, rng, 0.01);
        const Matrix drift_f = oracle::gaussian_matrix(32, 6, rng, 0.01);
        real += drift_r;
        feat += drift_f;
        const GaussianStats pd = estimate_gaussian(real);
        const FrechetForward cold = frechet_forward(feat, pd);
        const FrechetForward hot = frechet_forward(feat, pd, {}, &warm);
        CHECK(hot.value == doctest::Approx(cold.value).epsilon(1e-12));
        CHECK(oracle::max_abs_diff(frechet_backward(hot, &warm), frechet_backward(cold)) <= 1e-10);
        CHECK(warm.basis_d.has_value());
        CHECK(warm.basis_sqrt.has_value());
    }
}

TEST_CASE("frechet_grad matches finite differences") {
    oracle::Rng rng(55);
    for (SqrtMethod method : {SqrtMethod::newton_schulz, SqrtMethod::eig}) {
        for (int trial = 0; trial < 5; ++trial) {
            const SqrtConfig cfg{method, 15, 1e-10};
            const GaussianStats pd = estimate_gaussian(oracle::gaussian_matrix(64, 4, rng, 1.5, 0.3));
            const Matrix feat = oracle::gaussian_matrix(16, 4, rng);
            const DistanceReport r = frechet_grad(feat, pd, cfg);
            const Matrix numeric = oracle::finite_difference(
                [&](const Matrix& f) { return frechet_distance(pd, estimate_gaussian(f), cfg); }, feat, 1e-5);
            CHECK(oracle::max_rel_error(*r.grad, numeric) <= 1e-3);
        }
    }
}

TEST_CASE("translating the batch adds 2c/N to every gradient row") {
    oracle::Rng rng(56);
    const GaussianStats pd = random_stats(3, rng);
    const Matrix feat = oracle::gaussian_matrix(12, 3, rng);
    const Vector c{0.5, -2.0, 1.25};
    Matrix moved = feat;
    for (std::size_t i = 0; i < feat.rows(); ++i) {
        for (std::size_t j = 0; j < 3; ++j) moved(i, j) += c[j];
    }
    const SqrtConfig cfg{SqrtMethod::eig};
    const Matrix g0 = *frechet_grad(feat, pd, cfg).grad;
    const Matrix g1 = *frechet_grad(moved, pd, cfg).grad;
    for (std::size_t i = 0; i < feat.rows(); ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(g1(i, j) - g0(i, j) == doctest::Approx(2.0 * c[j] / 12.0).epsilon(1e-8));
        }
    }
}

TEST_CASE("batch collapsed onto the real mean") {
    oracle::Rng rng(57);
    const GaussianStats pd = random_stats(3, rng);
    Matrix feat = oracle::gaussian_matrix(20, 3, rng, 1e-6);
    for (std::size_t i = 0; i < feat.rows(); ++i) {
        for (std::size_t j = 0; j < 3; ++j) feat(i, j) += pd.mean[j];
    }
    const DistanceReport r = frechet_grad(feat, pd, {SqrtMethod::eig});
    CHECK(r.value == doctest::Approx(trace(pd.cov)).epsilon(1e-4));
    // The net pull on the batch mean (column sums) vanishes with the mean gap.
    for (std::size_t j = 0; j < 3; ++j) {
        double col = 0.0;
        for (std::size_t i = 0; i < feat.rows(); ++i) col += (*r.grad)(i, j);
        CHECK(std::abs(col) <= 1e-5);
    }
}

// --- exact OT ------------------------------------------------------------------

TEST_CASE("OT single pair and identical sets") {
    const Matrix x = Matrix::from_rows({{0.0, 0.0}});
    const Matrix y = Matrix::from_rows({{3.0, 4.0}});
    CHECK(ot_cost(x, y, 2).cost == 25.0);
    CHECK(ot_cost(x, y, 1).cost == 5.0);
    CHECK(ot_cost(x, y).assignment.perm == std::vector<std::size_t>{0});

    oracle::Rng rng(58);
    const Matrix z = oracle::gaussian_matrix(10, 3, rng);
    const OtResult self = ot_cost(z, z);
    CHECK(self.cost == 0.0);
    for (std::size_t i = 0; i < 10; ++i) CHECK(self.assignment.perm[i] == i);
}

TEST_CASE("OT equals the brute-force permutation minimum") {
    oracle::Rng rng(59);
    std::uniform_int_distribution<int> size(1, 7);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = size(rng);
        const Matrix x = oracle::gaussian_matrix(n, 2, rng);
        const Matrix y = oracle::gaussian_matrix(n, 2, rng);
        for (int p : {1, 2}) {
            const OtResult r = ot_cost(x, y, p);
            CHECK(r.cost == oracle::brute_force_ot(x, y, p));
            CHECK(r.assignment.is_permutation());
        }
    }
}

TEST_CASE("OT value is symmetric and permutation invariant") {
    oracle::Rng rng(60);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix x = oracle::gaussian_matrix(25, 3, rng);
        const Matrix y = oracle::gaussian_matrix(25, 3, rng, 2.0, 1.0);
        const double c = ot_cost(x, y).cost;
        CHECK(ot_cost(y, x).cost == c);
        CHECK(ot_cost(shuffled_rows(x, rng), y).cost == c);
        CHECK(ot_cost(x, shuffled_rows(y, rng)).cost == c);
    }
}

TEST_CASE("solve_assignment on a hand-made cost matrix") {
    const Matrix cost = Matrix::from_rows({{4, 1, 3}, {2, 0, 5}, {3, 2, 2}});
    const Assignment a = solve_assignment(cost);
    CHECK(a.perm == std::vector<std::size_t>{1, 0, 2});
    CHECK(a.inverse() == std::vector<std::size_t>{1, 0, 2});
    CHECK_THROWS_AS((void)solve_assignment(Matrix(2, 3)), ShapeError);
    CHECK_THROWS_AS((void)solve_assignment(Matrix(0, 0)), EmptyInputError);
}

TEST_CASE("assignment helpers") {
    const Assignment a{{2, 0, 1}};
    CHECK(a.is_permutation());
    CHECK(a.inverse() == std::vector<std::size_t>{1, 2, 0});
    CHECK_FALSE(Assignment{{0, 0, 1}}.is_permutation());
    CHECK_FALSE(Assignment{{0, 3, 1}}.is_permutation());
}

TEST_CASE("OT errors") {
    CHECK_THROWS_AS((void)ot_cost(Matrix(3, 2), Matrix(4, 2)), ShapeError);
    CHECK_THROWS_AS((void)ot_cost(Matrix(3, 2), Matrix(3, 1)), ShapeError);
    CHECK_THROWS_AS((void)ot_cost(Matrix(0, 2), Matrix(0, 2)), EmptyInputError);
    CHECK_THROWS_AS((void)ot_cost(Matrix(2, 2), Matrix(2, 2), 3), DomainError);
}

TEST_CASE("OT gradient examples") {
    oracle::Rng rng(61);
    const Matrix z = oracle::gaussian_matrix(6, 2, rng);
    CHECK(ot_grad(z, z, ot_cost(z, z).assignment) == Matrix(6, 2));

    const Matrix x = Matrix::from_rows({{0.0, 0.0}});
    const Matrix y = Matrix::from_rows({{1.0, 0.0}});
    CHECK(ot_grad(x, y, ot_cost(x, y).assignment) == Matrix::from_rows({{2.0, 0.0}}));
    CHECK(ot_grad(x, y, ot_cost(x, y, 1).assignment, 1) == Matrix::from_rows({{1.0, 0.0}}));

    CHECK_THROWS_AS((void)ot_grad(z, z, Assignment{{0, 0, 1, 2, 3, 4}}), DomainError);
    CHECK_THROWS_AS((void)ot_grad(z, z, Assignment{{0, 1}}), DomainError);
}

TEST_CASE("OT gradient matches finite differences while the matching is stable") {
    oracle::Rng rng(62);
    const double h = 1e-6;
    int checked = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const Matrix x = oracle::gaussian_matrix(5, 3, rng);
        const Matrix y = oracle::gaussian_matrix(5, 3, rng);
        for (int p : {1, 2}) {
            const OtResult base = ot_cost(x, y, p);
            bool stable = true;
            const Matrix numeric = oracle::finite_difference(
                [&](const Matrix& yy) {
                    const OtResult r = ot_cost(x, yy, p);
                    if (r.assignment.perm != base.assignment.perm) stable = false;
                    return r.cost;
                },
                y, h);
            if (!stable) continue;
            ++checked;
            CHECK(oracle::max_rel_error(ot_grad(x, y, base.assignment, p), numeric) <= 1e-6);
        }
    }
    CHECK(checked >= 30);
}

// --- 1D and sliced --------------------------------------------------------------

TEST_CASE("wasserstein_1d examples") {
    const Vector u{0.0, 1.0};
    const Vector v{1.0, 0.0};
    CHECK(wasserstein_1d(u, u) == 0.0);
    CHECK(wasserstein_1d(u, v) == 0.0);
    CHECK(wasserstein_1d(Vector{0.0, 1.0}, Vector{2.0, 4.0}) == 13.0);
    CHECK(wasserstein_1d(Vector{0.0, 1.0}, Vector{2.0, 4.0}, 1) == 5.0);
    CHECK_THROWS_AS((void)wasserstein_1d(Vector{1.0}, Vector{1.0, 2.0}), ShapeError);
}

TEST_CASE("wasserstein_1d equals OT on the same data") {
    oracle::Rng rng(63);
    for (std::size_t n : {1u, 2u, 7u, 32u, 64u}) {
        Vector u(n);
        Vector v(n);
        std::normal_distribution<double> normal(0.0, 3.0);
        for (std::size_t i = 0; i < n; ++i) {
            u[i] = normal(rng);
            v[i] = normal(rng) + 1.0;
        }
        CHECK(wasserstein_1d(u, v, 2) == ot_cost(column(u), column(v), 2).cost);
        CHECK(wasserstein_1d(u, v, 1) == ot_cost(column(u), column(v), 1).cost);
    }
}

TEST_CASE("canonical_sum ignores term order") {
    oracle::Rng rng(64);
    std::vector<double> terms(1000);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (double& t : terms) t = std::pow(10.0, 8.0 * u(rng) - 4.0);
    const double s = canonical_sum(terms);
    std::shuffle(terms.begin(), terms.end(), rng);
    CHECK(canonical_sum(terms) == s);
    std::reverse(terms.begin(), terms.end());
    CHECK(canonical_sum(terms) == s);
}

TEST_CASE("canonical_sum is the correctly rounded sum") {
    oracle::Rng rng(66);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::uniform_int_distribution<int> ex(-60, 60);
    for (int trial = 0; trial < 300; ++trial) {
        std::vector<double> terms(1 + trial % 40);
        for (double& t : terms) t = std::ldexp(u(rng), ex(rng));
        // Heavy cancellation against the first term.
        if (trial % 3 == 0) terms.push_back(-std::accumulate(terms.begin(), terms.end(), 0.0));
        CHECK(canonical_sum(terms) == oracle::exact_sum(terms));
    }
    // Ties at half an ulp round to even; a tiny third term breaks the tie.
    const double ulp = std::ldexp(1.0, -52);
    CHECK(canonical_sum({1.0, ulp / 2}) == 1.0);
    CHECK(canonical_sum({1.0 + ulp, ulp / 2}) == 1.0 + 2 * ulp);
    CHECK(canonical_sum({1.0, ulp / 2, 1e-300}) == 1.0 + ulp);
    CHECK(canonical_sum({}) == 0.0);
    CHECK(oracle::exact_sum({1.0, ulp / 2, 1e-300}) == 1.0 + ulp);
    CHECK(oracle::exact_sum({4.9e-324, 4.9e-324}) == 2 * 4.9e-324);
}

TEST_CASE("tied 1D matchings with p = 1 give one cost") {
    // x < y everywhere: every matching costs Σy − Σx exactly.
    const Matrix x = column({0.1, 0.7, 0.3});
    const Matrix y = column({1.9, 1.3, 2.2});
    const double direct = ot_cost(x, y, 1).cost;
    CHECK(direct == oracle::brute_force_ot(x, y, 1));
    const Matrix y_perm = column({2.2, 1.9, 1.3});
    CHECK(ot_cost(x, y_perm, 1).cost == direct);
    CHECK(ot_cost(y, x, 1).cost == direct);
}

TEST_CASE("random directions are unit length and seed deterministic") {
    oracle::Rng a(65);
    oracle::Rng b(65);
    for (int i = 0; i < 20; ++i) {
        const Vector w = random_direction(7, a);
        CHECK(norm(w) == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(random_direction(7, b) == w);
    }
    CHECK_THROWS_AS((void)random_direction(0, a), DomainError);
}

TEST_CASE("sliced Wasserstein basics") {
    oracle::Rng rng(66);
    const Matrix x = oracle::gaussian_matrix(20, 3, rng);
    for (std::size_t k : {1u, 5u, 50u}) CHECK(sliced_wasserstein(x, x, k, rng) == 0.0);

    // d = 1: every direction is ±1.
    const Matrix u = oracle::gaussian_matrix(15, 1, rng);
    const Matrix v = oracle::gaussian_matrix(15, 1, rng, 1.0, 2.0);
    Vector uu(u.data().begin(), u.data().end());
    Vector vv(v.data().begin(), v.data().end());
    for (std::size_t k : {1u, 3u, 10u}) {
        CHECK(sliced_wasserstein(u, v, k, rng) == doctest::Approx(wasserstein_1d(uu, vv)).epsilon(1e-12));
    }
    CHECK_THROWS_AS((void)sliced_wasserstein(x, x, 0, rng), DomainError);
    CHECK_THROWS_AS((void)sliced_wasserstein(x, Matrix(19, 3), 1, rng), ShapeError);
}

TEST_CASE("sliced Wasserstein is deterministic per seed and stable for large k") {
    oracle::Rng data_rng(67);
    const Matrix x = oracle::gaussian_matrix(16, 4, data_rng);
    const Matrix y = oracle::gaussian_matrix(16, 4, data_rng, 1.5, 0.5);
    oracle::Rng s1(1);
    oracle::Rng s1_again(1);
    CHECK(sliced_wasserstein(x, y, 20, s1) == sliced_wasserstein(x, y, 20, s1_again));
    oracle::Rng a(100);
    oracle::Rng b(200);
    const double va = sliced_wasserstein(x, y, 10000, a);
    const double vb = sliced_wasserstein(x, y, 10000, b);
    CHECK(std::abs(va - vb) <= 0.02 * std::max(va, vb));
}

TEST_CASE("sliced Wasserstein gradient matches finite differences") {
    oracle::Rng data_rng(68);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix x = oracle::gaussian_matrix(8, 3, data_rng);
        const Matrix y = oracle::gaussian_matrix(8, 3, data_rng);
        oracle::Rng seeded(300 + trial);
        const DistanceReport r = sliced_wasserstein_grad(x, y, 12, seeded);
        const Matrix numeric = oracle::finite_difference(
            [&](const Matrix& yy) {
                oracle::Rng again(300 + trial);
                return sliced_wasserstein(x, yy, 12, again);
            },
            y, 1e-6);
        CHECK(oracle::max_rel_error(*r.grad, numeric) <= 1e-6);
    }
}

TEST_CASE("max-sliced finds a separating axis") {
    oracle::Rng rng(69);
    Matrix x = oracle::gaussian_matrix(64, 5, rng, 0.1);
    Matrix y = oracle::gaussian_matrix(64, 5, rng, 0.1);
    for (std::size_t i = 0; i < 64; ++i) y(i, 0) += 3.0;
    const MaxSlicedResult r = max_sliced_wasserstein(x, y, 100, 0, rng);
    CHECK(std::abs(r.direction[0]) >= 0.9);
    CHECK(norm(r.direction) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(max_sliced_wasserstein(x, x, 10, 5, rng).value == 0.0);
}

TEST_CASE("max-sliced dominates random candidates and ascent never hurts") {
    oracle::Rng data_rng(70);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix x = oracle::gaussian_matrix(30, 4, data_rng);
        const Matrix y = oracle::gaussian_matrix(30, 4, data_rng, 1.0, 0.3);
        oracle::Rng a(trial);
        oracle::Rng b(trial);
        oracle::Rng c(trial);
        const double plain = max_sliced_wasserstein(x, y, 16, 0, a).value;
        const double refined = max_sliced_wasserstein(x, y, 16, 10, b).value;
        CHECK(refined >= plain);
        // The same candidates averaged can never beat their best.
        CHECK(plain >= sliced_wasserstein(x, y, 16, c));
    }
}

TEST_CASE("max-sliced gradient matches finite differences") {
    oracle::Rng data_rng(71);
    for (int trial = 0; trial < 5; ++trial) {
        const Matrix x = oracle::gaussian_matrix(8, 3, data_rng);
        const Matrix y = oracle::gaussian_matrix(8, 3, data_rng);
        oracle::Rng seeded(400 + trial);
        const DistanceReport r = max_sliced_wasserstein_grad(x, y, 12, 0, seeded);
        const Matrix numeric = oracle::finite_difference(
            [&](const Matrix& yy) {
                oracle::Rng again(400 + trial);
                return max_sliced_wasserstein(x, yy, 12, 0, again).value;
            },
            y, 1e-6);
        CHECK(oracle::max_rel_error(*r.grad, numeric) <= 1e-6);
        oracle::Rng again(400 + trial);
        CHECK(r.value == doctest::Approx(max_sliced_wasserstein(x, y, 12, 0, again).value).epsilon(1e-12));
    }
}

TEST_CASE("pairwise_cost") {
    const Matrix x = Matrix::from_rows({{0, 0}, {1, 1}});
    const Matrix y = Matrix::from_rows({{3, 4}});
    const Matrix c2 = pairwise_cost(x, y, 2);
    CHECK(c2(0, 0) == 25.0);
    CHECK(c2(1, 0) == 13.0);
    CHECK(pairwise_cost(x, y, 1)(0, 0) == 5.0);
}

}  // TEST_SUITE
