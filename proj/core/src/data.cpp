#include "fot/data.hpp"

#include <cmath>
#include <numbers>

#include "fot/error.hpp"

namespace fot {

void DatasetSpec::validate() const {
    if (!(noise_std >= 0.0)) throw ConfigError("dataset: noise_std must be >= 0");
    if (!(scale > 0.0)) throw ConfigError("dataset: scale must be > 0");
}

DatasetSpec default_dataset(DatasetKind kind) {
    switch (kind) {
        case DatasetKind::gaussians8: return {kind, 0.02, 2.0, 0};
        case DatasetKind::gaussians25: return {kind, 0.05, 2.0, 0};
        case DatasetKind::swissroll: return {kind, 0.05, 2.0, 0};
    }
    return {};
}

std::vector<Point2> mode_centers(const DatasetSpec& spec) {
    std::vector<Point2> centers;
    switch (spec.kind) {
        case DatasetKind::gaussians8:
            for (int k = 0; k < 8; ++k) {
                const double angle = 2.0 * std::numbers::pi * k / 8.0;
                centers.push_back({spec.scale * std::cos(angle), spec.scale * std::sin(angle)});
            }
            break;
        case DatasetKind::gaussians25:
            for (int i = -2; i <= 2; ++i) {
                for (int j = -2; j <= 2; ++j) centers.push_back({spec.scale * i, spec.scale * j});
            }
            break;
        case DatasetKind::swissroll:
            break;
    }
    return centers;
}

Matrix sample_real(const DatasetSpec& spec, std::size_t n, Rng& rng, ModeOrder order) {
    spec.validate();
    if (n == 0) throw DomainError("sample_real: n must be >= 1");
    Matrix out(n, 2);
    std::normal_distribution<double> noise(0.0, 1.0);

    if (spec.kind == DatasetKind::swissroll) {
        constexpr double lo = 1.5 * std::numbers::pi;
        constexpr double hi = 4.5 * std::numbers::pi;
        std::uniform_real_distribution<double> angle(lo, hi);
        for (std::size_t i = 0; i < n; ++i) {
            const double t = angle(rng);
            out(i, 0) = t * std::cos(t) / hi * spec.scale + spec.noise_std * noise(rng);
            out(i, 1) = t * std::sin(t) / hi * spec.scale + spec.noise_std * noise(rng);
        }
        return out;
    }

    const std::vector<Point2> centers = mode_centers(spec);
    std::uniform_int_distribution<std::size_t> pick(0, centers.size() - 1);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t k = order == ModeOrder::stratified ? i % centers.size() : pick(rng);
        out(i, 0) = centers[k][0] + spec.noise_std * noise(rng);
        out(i, 1) = centers[k][1] + spec.noise_std * noise(rng);
    }
    return out;
}

Matrix sample_prior(std::size_t z_dim, std::size_t n, Rng& rng) {
    if (z_dim == 0) throw DomainError("sample_prior: z_dim must be >= 1");
    Matrix z(n, z_dim);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : z.data()) v = normal(rng);
    return z;
}

std::string to_string(DatasetKind kind) {
    switch (kind) {
        case DatasetKind::gaussians8: return "gaussians8";
        case DatasetKind::gaussians25: return "gaussians25";
        case DatasetKind::swissroll: return "swissroll";
    }
    return "gaussians8";
}

DatasetKind dataset_from_string(const std::string& name) {
    if (name == "gaussians8") return DatasetKind::gaussians8;
    if (name == "gaussians25") return DatasetKind::gaussians25;
    if (name == "swissroll") return DatasetKind::swissroll;
    throw ConfigError("unknown dataset '" + name + "'");
}

}  // namespace fot
