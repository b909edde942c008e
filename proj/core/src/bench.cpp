#include "fot/bench.hpp"

#include <algorithm>
#include <chrono>

#include "fot/csv.hpp"
#include "fot/error.hpp"
#include "fot/stats.hpp"

namespace fot {

namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
    return std::chrono::duration<double, std::milli>(b - a).count();
}

Matrix random_features(std::size_t n, std::size_t d, double shift, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix m(n, d);
    for (double& v : m.data()) v = normal(rng) + shift;
    return m;
}

}  // namespace

std::string to_string(BenchMethod m) { return m == BenchMethod::ot ? "ot" : "frechet"; }

BenchMethod bench_method_from_string(const std::string& name) {
    if (name == "ot") return BenchMethod::ot;
    if (name == "frechet") return BenchMethod::frechet;
    throw ConfigError("unknown bench method '" + name + "'");
}

std::string format_bench_row(const BenchRow& row) {
    return to_string(row.method) + ',' + std::to_string(row.n) + ',' + std::to_string(row.d) + ',' +
           std::to_string(row.trial) + ',' + csv::format_double(row.forward_ms) + ',' +
           csv::format_double(row.backward_ms);
}

std::vector<BenchRow> bench_distances(const std::vector<BenchMethod>& methods,
                                      const std::vector<std::size_t>& n_values, std::size_t d,
                                      std::size_t trials, Rng& rng, const SqrtConfig& sqrt_cfg) {
    if (trials < 3) throw ConfigError("bench: need at least 3 trials");
    if (d == 0) throw ConfigError("bench: feature dimension must be >= 1");
    for (std::size_t n : n_values) {
        if (n < 2) throw ConfigError("bench: every batch size must be >= 2");
    }

    std::vector<BenchRow> rows;
    for (BenchMethod method : methods) {
        for (std::size_t n : n_values) {
            for (std::size_t trial = 0; trial < trials; ++trial) {
                const Matrix real = random_features(n, d, 0.0, rng);
                const Matrix fake = random_features(n, d, 0.5, rng);
                BenchRow row{method, n, d, trial, 0.0, 0.0};
                if (method == BenchMethod::ot) {
                    const auto t0 = Clock::now();
                    const OtResult ot = ot_cost(real, fake, 2);
                    const auto t1 = Clock::now();
                    [[maybe_unused]] const Matrix grad = ot_grad(real, fake, ot.assignment, 2);
                    const auto t2 = Clock::now();
                    row.forward_ms = ms_between(t0, t1);
                    row.backward_ms = ms_between(t1, t2);
                } else {
                    const auto t0 = Clock::now();
                    const GaussianStats pd = estimate_gaussian(real);
                    const FrechetForward fwd = frechet_forward(fake, pd, sqrt_cfg);
                    const auto t1 = Clock::now();
                    [[maybe_unused]] const Matrix grad = frechet_backward(fwd);
                    const auto t2 = Clock::now();
                    row.forward_ms = ms_between(t0, t1);
                    row.backward_ms = ms_between(t1, t2);
                }
                if (trial > 0) rows.push_back(row);
            }
        }
    }
    return rows;
}

double median_total_ms(const std::vector<BenchRow>& rows, BenchMethod method, std::size_t n) {
    std::vector<double> totals;
    for (const BenchRow& r : rows) {
        if (r.method == method && r.n == n) totals.push_back(r.forward_ms + r.backward_ms);
    }
    if (totals.empty()) throw DomainError("median_total_ms: no matching rows");
    std::sort(totals.begin(), totals.end());
    const std::size_t mid = totals.size() / 2;
    return totals.size() % 2 == 1 ? totals[mid] : 0.5 * (totals[mid - 1] + totals[mid]);
}

}  // namespace fot
