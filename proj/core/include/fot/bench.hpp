#pragma once

#include <string>
#include <vector>

#include "fot/distances.hpp"

namespace fot {

enum class BenchMethod { ot, frechet };

[[nodiscard]] std::string to_string(BenchMethod m);
[[nodiscard]] BenchMethod bench_method_from_string(const std::string& name);

struct BenchRow {
    BenchMethod method = BenchMethod::ot;
    std::size_t n = 0;
    std::size_t d = 0;
    std::size_t trial = 0;
    double forward_ms = 0.0;
    double backward_ms = 0.0;
};

inline constexpr const char* kBenchHeader = "method,n,d,trial,forward_ms,backward_ms";

[[nodiscard]] std::string format_bench_row(const BenchRow& row);

/// Times forward distance and gradient on random N×d feature pairs for every
/// (method, N). Trials run sequentially; trial 0 is a warm-up and is not
/// reported, so each cell yields trials − 1 rows. Requires every N ≥ 2 and
/// trials ≥ 3.
[[nodiscard]] std::vector<BenchRow> bench_distances(const std::vector<BenchMethod>& methods,
                                                    const std::vector<std::size_t>& n_values,
                                                    std::size_t d, std::size_t trials, Rng& rng,
                                                    const SqrtConfig& sqrt_cfg = {});

/// Median of forward+backward over the rows matching (method, n).
[[nodiscard]] double median_total_ms(const std::vector<BenchRow>& rows, BenchMethod method,
                                     std::size_t n);

}  // namespace fot
