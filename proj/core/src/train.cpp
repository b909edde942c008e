#include "fot/train.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fot/csv.hpp"
#include "fot/matsqrt.hpp"
#include "fot/stats.hpp"

namespace fot {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

enum Stream : std::uint32_t { kInit = 1, kData = 2, kPrior = 3, kProjection = 4, kSnapshot = 5 };

Rng make_stream(std::uint64_t seed, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return Rng(seq);
}

std::vector<std::size_t> widths(std::size_t in, const std::vector<std::size_t>& hidden,
                                std::size_t out) {
    std::vector<std::size_t> w{in};
    w.insert(w.end(), hidden.begin(), hidden.end());
    w.push_back(out);
    return w;
}

std::string describe_spectrum(const Matrix& features) {
    std::ostringstream out;
    try {
        const GaussianStats stats = estimate_gaussian(features);
        const SymEig eig = sym_eig(stats.cov);
        out << "[";
        for (std::size_t i = 0; i < eig.values.size(); ++i) {
            if (i > 0) out << ", ";
            out << std::setprecision(6) << eig.values[i];
        }
        out << "]";
    } catch (const std::exception& e) {
        out << "<unavailable: " << e.what() << ">";
    }
    return out.str();
}

std::string snapshot_name(std::size_t step) {
    std::ostringstream name;
    name << "step_" << std::setw(6) << std::setfill('0') << step << ".csv";
    return name.str();
}

void write_snapshot(const std::filesystem::path& path, std::size_t step, const Matrix& points) {
    std::ofstream out(path);
    if (!out) throw ConfigError("train: cannot write snapshot " + path.string());
    out << kSnapshotHeader << '\n';
    const std::string step_cell = std::to_string(step);
    for (std::size_t i = 0; i < points.rows(); ++i) {
        out << step_cell << ',' << csv::format_double(points(i, 0)) << ','
            << csv::format_double(points(i, 1)) << '\n';
    }
}

}  // namespace

std::string to_string(GenLoss loss) {
    switch (loss) {
        case GenLoss::frechet: return "frechet";
        case GenLoss::ot: return "ot";
        case GenLoss::swg: return "swg";
        case GenLoss::max_swg: return "max_swg";
    }
    return "frechet";
}

GenLoss gen_loss_from_string(const std::string& name) {
    if (name == "frechet") return GenLoss::frechet;
    if (name == "ot") return GenLoss::ot;
    if (name == "swg") return GenLoss::swg;
    if (name == "max_swg" || name == "max-swg") return GenLoss::max_swg;
    throw ConfigError("unknown generator loss '" + name + "'");
}

void TrainConfig::validate() const {
    dataset.validate();
    if (batch_size < 2) throw ConfigError("train: batch size must be >= 2");
    if (d_steps_per_g < 1) throw ConfigError("train: d_steps_per_g must be >= 1");
    if (sqrt_iterations < 1 || sqrt_iterations > 100) {
        throw ConfigError("train: sqrt iterations must lie in [1, 100]");
    }
    if (swg_projections < 1) throw ConfigError("train: swg projections must be >= 1");
    if (max_swg_candidates < 1) throw ConfigError("train: max-swg candidates must be >= 1");
    if (ot_exponent != 1 && ot_exponent != 2) throw ConfigError("train: ot exponent must be 1 or 2");
    if (z_dim < 1) throw ConfigError("train: z_dim must be >= 1");
    if (d_hidden.empty()) throw ConfigError("train: discriminator needs a hidden layer");
    if (!(init_std > 0.0)) throw ConfigError("train: init_std must be > 0");
    if (!(coverage_radius > 0.0)) throw ConfigError("train: coverage radius must be > 0");
    if (!(d_optimizer.lr > 0.0) || !(g_optimizer.lr > 0.0)) {
        throw ConfigError("train: learning rates must be > 0");
    }
}

std::string format_metrics_row(const MetricsRow& row) {
    std::string out = std::to_string(row.step);
    for (double v : {row.d_loss, row.g_loss, row.d_ms, row.g_fwd_ms, row.g_bwd_ms}) {
        out += ',';
        out += csv::format_double(v);
    }
    out += ',';
    if (row.mode_coverage) out += std::to_string(*row.mode_coverage);
    out += ',';
    if (row.hq_fraction) out += csv::format_double(*row.hq_fraction);
    return out;
}

CoverageResult mode_coverage(const Matrix& samples, const std::vector<Point2>& centers,
                             double radius) {
    if (samples.rows() == 0) throw DomainError("mode_coverage: no samples");
    if (samples.cols() != 2) throw ShapeError("mode_coverage: samples must be 2D");
    if (!(radius > 0.0)) throw DomainError("mode_coverage: radius must be > 0");
    std::vector<std::size_t> hits(centers.size(), 0);
    std::size_t near_any = 0;
    const double r2 = radius * radius;
    for (std::size_t i = 0; i < samples.rows(); ++i) {
        bool near = false;
        for (std::size_t c = 0; c < centers.size(); ++c) {
            const double dx = samples(i, 0) - centers[c][0];
            const double dy = samples(i, 1) - centers[c][1];
            if (dx * dx + dy * dy <= r2) {
                ++hits[c];
                near = true;
            }
        }
        if (near) ++near_any;
    }
    CoverageResult out;
    const double n = static_cast<double>(samples.rows());
    for (std::size_t h : hits) {
        if (static_cast<double>(h) >= 0.01 * n) ++out.covered;
    }
    out.high_quality_fraction = static_cast<double>(near_any) / n;
    return out;
}

Models initial_models(const TrainConfig& cfg) {
    Rng rng = make_stream(cfg.seed, kInit);
    Models m;
    m.generator = make_mlp(widths(cfg.z_dim, cfg.g_hidden, 2), Activation::linear, cfg.init_std, rng);
    m.discriminator =
        make_mlp(widths(2, cfg.d_hidden, 1), Activation::sigmoid, cfg.init_std, rng);
    return m;
}

LossAndGrads discriminator_loss_and_grad(const MlpParams& disc, const Matrix& real,
                                         const Matrix& fake) {
    const auto start = Clock::now();
    const ForwardResult on_real = mlp_forward(disc, real);
    const ForwardResult on_fake = mlp_forward(disc, fake);
    const BceResult bce = bce_discriminator_loss(clamp_probabilities(on_real.output),
                                                 clamp_probabilities(on_fake.output));
    LossAndGrads out;
    out.loss = bce.loss;
    out.forward_ms = ms_since(start);

    const auto back_start = Clock::now();
    BackwardResult g_real = mlp_backward(disc, on_real.cache, bce.grad_real);
    const BackwardResult g_fake = mlp_backward(disc, on_fake.cache, bce.grad_fake);
    for (std::size_t l = 0; l < g_real.param_grads.layers.size(); ++l) {
        Layer& acc = g_real.param_grads.layers[l];
        const Layer& other = g_fake.param_grads.layers[l];
        acc.weight += other.weight;
        for (std::size_t j = 0; j < acc.bias.size(); ++j) acc.bias[j] += other.bias[j];
    }
    out.grads = std::move(g_real.param_grads);
    out.backward_ms = ms_since(back_start);
    return out;
}

LossAndGrads generator_loss_and_grad(const MlpParams& gen, const MlpParams& disc, const Matrix& z,
                                     const Matrix& real, const TrainConfig& cfg, Rng& rng,
                                     FrechetWarmStart* warm) {
    const auto start = Clock::now();
    const ForwardResult generated = mlp_forward(gen, z);
    const Matrix real_features = extract_features(disc, real);
    const ForwardResult fake = features_forward(disc, generated.output);
    const double n = static_cast<double>(z.rows());

    LossAndGrads out;
    Matrix feature_grad;
    Clock::time_point back_start;
    switch (cfg.gen_loss) {
        case GenLoss::frechet: {
            const GaussianStats pd = estimate_gaussian(real_features);
            SqrtConfig sqrt_cfg;
            sqrt_cfg.iterations = cfg.sqrt_iterations;
            const FrechetForward fwd = frechet_forward(fake.output, pd, sqrt_cfg, warm);
            out.loss = fwd.value;
            out.forward_ms = ms_since(start);
            back_start = Clock::now();
            feature_grad = frechet_backward(fwd, warm);
            break;
        }
        case GenLoss::ot: {
            const OtResult ot = ot_cost(real_features, fake.output, cfg.ot_exponent);
            out.loss = ot.cost / n;
            out.forward_ms = ms_since(start);
            back_start = Clock::now();
            feature_grad = ot_grad(real_features, fake.output, ot.assignment, cfg.ot_exponent);
            feature_grad *= 1.0 / n;
            break;
        }
        case GenLoss::swg:
        case GenLoss::max_swg: {
            DistanceReport report =
                cfg.gen_loss == GenLoss::swg
                    ? sliced_wasserstein_grad(real_features, fake.output, cfg.swg_projections, rng)
                    : max_sliced_wasserstein_grad(real_features, fake.output,
                                                  cfg.max_swg_candidates,
                                                  cfg.max_swg_ascent_steps, rng);
            out.loss = report.value / n;
            out.forward_ms = ms_since(start);
            back_start = Clock::now();
            feature_grad = std::move(*report.grad);
            feature_grad *= 1.0 / n;
            break;
        }
    }

    const BackwardResult through_disc = mlp_backward(disc, fake.cache, feature_grad);
    BackwardResult through_gen = mlp_backward(gen, generated.cache, through_disc.input_grads);
    out.grads = std::move(through_gen.param_grads);
    out.backward_ms = ms_since(back_start);
    return out;
}

TrainResult train_gan(const TrainConfig& cfg, const TrainObserver& observer) {
    cfg.validate();
    TrainResult result;
    result.models = initial_models(cfg);
    MlpParams& gen = result.models.generator;
    MlpParams& disc = result.models.discriminator;
    AdamState g_state = make_adam_state(gen, cfg.g_optimizer);
    AdamState d_state = make_adam_state(disc, cfg.d_optimizer);

    Rng data_rng = make_stream(cfg.seed, kData);
    Rng prior_rng = make_stream(cfg.seed, kPrior);
    Rng projection_rng = make_stream(cfg.seed, kProjection);
    Rng snapshot_rng = make_stream(cfg.seed, kSnapshot);
    const Matrix snapshot_z = sample_prior(cfg.z_dim, cfg.snapshot_points, snapshot_rng);
    const std::vector<Point2> centers = mode_centers(cfg.dataset);

    const bool write_files = !cfg.out_dir.empty();
    std::ofstream metrics_out;
    if (write_files) {
        std::filesystem::create_directories(cfg.out_dir / "snapshots");
        metrics_out.open(cfg.out_dir / "metrics.csv");
        if (!metrics_out) throw ConfigError("train: cannot write metrics.csv");
        metrics_out << kMetricsHeader << '\n';
    }

    const std::size_t n = cfg.batch_size;
    FrechetWarmStart warm;
    for (std::size_t step = 1; step <= cfg.steps; ++step) {
        MetricsRow row;
        row.step = step;
        Matrix real;
        Matrix z;
        try {
            const auto d_start = Clock::now();
            for (std::size_t k = 0; k < cfg.d_steps_per_g; ++k) {
                real = sample_real(cfg.dataset, n, data_rng);
                z = sample_prior(cfg.z_dim, n, prior_rng);
                const Matrix fake = mlp_forward(gen, z).output;
                const LossAndGrads d = discriminator_loss_and_grad(disc, real, fake);
                adam_step(disc, d.grads, d_state);
                row.d_loss = d.loss;
                if (observer.on_discriminator_update) observer.on_discriminator_update(step, disc);
            }
            row.d_ms = ms_since(d_start);

            const LossAndGrads g = generator_loss_and_grad(gen, disc, z, real, cfg, projection_rng, &warm);
            adam_step(gen, g.grads, g_state);
            row.g_loss = g.loss;
            row.g_fwd_ms = g.forward_ms;
            row.g_bwd_ms = g.backward_ms;
            if (!std::isfinite(row.d_loss) || !std::isfinite(row.g_loss)) {
                throw DivergenceError("non-finite loss", 0);
            }
        } catch (const Error& e) {
            std::ostringstream msg;
            msg << "training aborted at step " << step << ": " << e.what();
            std::string real_spectrum = "<none>";
            std::string fake_spectrum = "<none>";
            if (real.rows() >= 2) {
                real_spectrum = describe_spectrum(extract_features(disc, real));
                fake_spectrum = describe_spectrum(extract_features(disc, mlp_forward(gen, z).output));
                msg << "\n  real feature covariance spectrum: " << real_spectrum
                    << "\n  fake feature covariance spectrum: " << fake_spectrum;
            }
            if (write_files) {
                nlohmann::json diag;
                diag["step"] = step;
                diag["error"] = e.what();
                diag["real_feature_spectrum"] = real_spectrum;
                diag["fake_feature_spectrum"] = fake_spectrum;
                std::ofstream(cfg.out_dir / "abort_diagnostic.json") << diag.dump(2) << '\n';
            }
            throw TrainingAborted(msg.str(), step);
        }

        if (!cfg.record_timing) {
            row.d_ms = 0.0;
            row.g_fwd_ms = 0.0;
            row.g_bwd_ms = 0.0;
        }

        const bool snapshot = cfg.snapshot_every > 0 &&
                              (step % cfg.snapshot_every == 0 || step == cfg.steps);
        if (snapshot) {
            const Matrix points = mlp_forward(gen, snapshot_z).output;
            if (!centers.empty() && points.rows() > 0) {
                const CoverageResult cov = mode_coverage(points, centers, cfg.coverage_radius);
                row.mode_coverage = cov.covered;
                row.hq_fraction = cov.high_quality_fraction;
            }
            if (write_files) {
                write_snapshot(cfg.out_dir / "snapshots" / snapshot_name(step), step, points);
            }
        }

        if (write_files) metrics_out << format_metrics_row(row) << '\n';
        if (observer.on_metrics) observer.on_metrics(row);
        result.metrics.push_back(std::move(row));
    }

    if (write_files) {
        metrics_out.flush();
        save_checkpoint(cfg.out_dir / "generator.json", gen);
        save_checkpoint(cfg.out_dir / "discriminator.json", disc);
    }
    return result;
}

}  // namespace fot
