#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "fot/bench.hpp"
#include "fot/csv.hpp"
#include "fot/data.hpp"
#include "fot/distances.hpp"
#include "fot/error.hpp"
#include "fot/matsqrt.hpp"
#include "fot/stats.hpp"
#include "fot/train.hpp"

namespace fot::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GlobalOptions {
    std::optional<std::uint64_t> seed;
    std::string out_dir;
};

fs::path prepare_out_dir(const GlobalOptions& g) {
    fs::path dir = g.out_dir.empty() ? fs::path(".") : fs::path(g.out_dir);
    fs::create_directories(dir);
    return dir;
}

// ---------------------------------------------------------------------------
// train

struct TrainOptions {
    std::string config;
    std::optional<std::string> dataset;
    std::optional<std::string> gen_loss;
    std::optional<std::size_t> steps;
    std::optional<std::size_t> batch_size;
    std::optional<std::size_t> d_steps;
    std::optional<std::string> optimizer;
    std::optional<double> lr_d;
    std::optional<double> lr_g;
    std::optional<double> beta1;
    std::optional<double> beta2;
    std::optional<int> sqrt_iters;
    std::optional<std::size_t> swg_projections;
    std::optional<std::size_t> max_swg_candidates;
    std::optional<std::size_t> max_swg_ascent;
    std::optional<int> ot_exponent;
    std::optional<std::size_t> z_dim;
    std::optional<double> noise_std;
    std::optional<double> scale;
    std::optional<std::size_t> snapshot_every;
    std::optional<std::size_t> snapshot_points;
    bool no_timing = false;
};

template <typename T>
void take(const json& j, const char* key, T& target) {
    if (j.contains(key)) target = j.at(key).get<T>();
}

constexpr const char* kConfigKeys[] = {
    "dataset", "gen_loss", "steps", "batch_size", "d_steps_per_g", "optimizer", "lr_d", "lr_g",
    "beta1", "beta2", "sqrt_iterations", "swg_projections", "max_swg_candidates",
    "max_swg_ascent_steps", "ot_exponent", "z_dim", "noise_std", "scale", "seed", "snapshot_every",
    "snapshot_points", "record_timing"};

OptimizerKind optimizer_from_string(const std::string& name) {
    if (name == "adam") return OptimizerKind::adam;
    if (name == "sgd") return OptimizerKind::sgd;
    throw ConfigError("unknown optimizer '" + name + "'");
}

TrainConfig build_train_config(const TrainOptions& o, const GlobalOptions& g) {
    TrainConfig cfg;
    std::optional<std::string> dataset = o.dataset;
    json j = json::object();

    if (!o.config.empty()) {
        std::ifstream in(o.config);
        if (!in) throw UsageError("cannot read config file " + o.config);
        try {
            j = json::parse(in);
        } catch (const json::exception& e) {
            throw UsageError("config " + o.config + ": " + e.what());
        }
        if (!j.is_object()) throw UsageError("config " + o.config + ": expected a JSON object");
        for (const auto& [key, value] : j.items()) {
            if (std::find(std::begin(kConfigKeys), std::end(kConfigKeys), key) == std::end(kConfigKeys)) {
                throw UsageError("config " + o.config + ": unknown key '" + key + "'");
            }
        }
        if (!dataset && j.contains("dataset")) dataset = j.at("dataset").get<std::string>();
    }
    if (!dataset) throw UsageError("a dataset is required (--dataset or a config file)");
    // The kind picks the defaults; noise and scale then layer on top.
    cfg.dataset = default_dataset(dataset_from_string(*dataset));

    try {
        if (j.contains("gen_loss")) cfg.gen_loss = gen_loss_from_string(j.at("gen_loss"));
        take(j, "steps", cfg.steps);
        take(j, "batch_size", cfg.batch_size);
        take(j, "d_steps_per_g", cfg.d_steps_per_g);
        if (j.contains("optimizer")) {
            const auto kind = optimizer_from_string(j.at("optimizer"));
            cfg.d_optimizer.kind = kind;
            cfg.g_optimizer.kind = kind;
        }
        take(j, "lr_d", cfg.d_optimizer.lr);
        take(j, "lr_g", cfg.g_optimizer.lr);
        if (j.contains("beta1")) {
            cfg.d_optimizer.beta1 = cfg.g_optimizer.beta1 = j.at("beta1").get<double>();
        }
        if (j.contains("beta2")) {
            cfg.d_optimizer.beta2 = cfg.g_optimizer.beta2 = j.at("beta2").get<double>();
        }
        take(j, "sqrt_iterations", cfg.sqrt_iterations);
        take(j, "swg_projections", cfg.swg_projections);
        take(j, "max_swg_candidates", cfg.max_swg_candidates);
        take(j, "max_swg_ascent_steps", cfg.max_swg_ascent_steps);
        take(j, "ot_exponent", cfg.ot_exponent);
        take(j, "z_dim", cfg.z_dim);
        take(j, "noise_std", cfg.dataset.noise_std);
        take(j, "scale", cfg.dataset.scale);
        take(j, "seed", cfg.seed);
        take(j, "snapshot_every", cfg.snapshot_every);
        take(j, "snapshot_points", cfg.snapshot_points);
        take(j, "record_timing", cfg.record_timing);
    } catch (const json::exception& e) {
        throw UsageError("config " + o.config + ": " + e.what());
    }

    if (o.gen_loss) cfg.gen_loss = gen_loss_from_string(*o.gen_loss);
    if (o.steps) cfg.steps = *o.steps;
    if (o.batch_size) cfg.batch_size = *o.batch_size;
    if (o.d_steps) cfg.d_steps_per_g = *o.d_steps;
    if (o.optimizer) {
        cfg.d_optimizer.kind = cfg.g_optimizer.kind = optimizer_from_string(*o.optimizer);
    }
    if (o.lr_d) cfg.d_optimizer.lr = *o.lr_d;
    if (o.lr_g) cfg.g_optimizer.lr = *o.lr_g;
    if (o.beta1) cfg.d_optimizer.beta1 = cfg.g_optimizer.beta1 = *o.beta1;
    if (o.beta2) cfg.d_optimizer.beta2 = cfg.g_optimizer.beta2 = *o.beta2;
    if (o.sqrt_iters) cfg.sqrt_iterations = *o.sqrt_iters;
    if (o.swg_projections) cfg.swg_projections = *o.swg_projections;
    if (o.max_swg_candidates) cfg.max_swg_candidates = *o.max_swg_candidates;
    if (o.max_swg_ascent) cfg.max_swg_ascent_steps = *o.max_swg_ascent;
    if (o.ot_exponent) cfg.ot_exponent = *o.ot_exponent;
    if (o.z_dim) cfg.z_dim = *o.z_dim;
    if (o.noise_std) cfg.dataset.noise_std = *o.noise_std;
    if (o.scale) cfg.dataset.scale = *o.scale;
    if (o.snapshot_every) cfg.snapshot_every = *o.snapshot_every;
    if (o.snapshot_points) cfg.snapshot_points = *o.snapshot_points;
    if (o.no_timing) cfg.record_timing = false;
    if (g.seed) cfg.seed = *g.seed;
    cfg.dataset.seed = cfg.seed;
    cfg.validate();
    return cfg;
}

int cmd_train(const TrainOptions& o, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
    TrainConfig cfg = build_train_config(o, g);
    cfg.out_dir = prepare_out_dir(g);
    err << "training " << to_string(cfg.gen_loss) << " on " << to_string(cfg.dataset.kind) << " for "
        << cfg.steps << " steps (batch " << cfg.batch_size << ", seed " << cfg.seed << ")\n";

    TrainObserver observer;
    const std::size_t every = std::max<std::size_t>(1, cfg.steps / 10);
    observer.on_metrics = [&err, every](const MetricsRow& row) {
        if (row.step % every == 0) {
            err << "step " << row.step << "  d_loss " << row.d_loss << "  g_loss " << row.g_loss;
            if (row.mode_coverage) err << "  modes " << *row.mode_coverage;
            err << '\n';
        }
    };
    const TrainResult result = train_gan(cfg, observer);

    json summary;
    summary["command"] = "train";
    summary["steps"] = result.metrics.size();
    summary["metrics"] = (cfg.out_dir / "metrics.csv").string();
    summary["generator"] = (cfg.out_dir / "generator.json").string();
    summary["discriminator"] = (cfg.out_dir / "discriminator.json").string();
    if (!result.metrics.empty()) {
        const MetricsRow& last = result.metrics.back();
        summary["final_d_loss"] = last.d_loss;
        summary["final_g_loss"] = last.g_loss;
        if (last.mode_coverage) summary["mode_coverage"] = *last.mode_coverage;
        if (last.hq_fraction) summary["hq_fraction"] = *last.hq_fraction;
    }
    out << summary.dump() << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// check-sqrt

struct CheckSqrtOptions {
    std::size_t d = 32;
    std::vector<int> t_values{1, 2, 4, 6, 8, 10, 12, 15, 20};
    std::size_t trials = 5;
    std::size_t fd_directions = 8;
};

Matrix random_psd(std::size_t d, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> exponent(-3.0, 1.0);
    Matrix g(d, d);
    for (double& v : g.data()) v = normal(rng);
    const SymEig basis = sym_eig(symmetrize(g));
    Vector lambda(d);
    for (double& l : lambda) l = std::pow(10.0, exponent(rng));
    return reconstruct(SymEig{lambda, basis.vectors});
}

Matrix random_symmetric_unit(std::size_t d, Rng& rng) {
    std::normal_distribution<double> normal(0.0, 1.0);
    Matrix e(d, d);
    for (double& v : e.data()) v = normal(rng);
    e = symmetrize(e);
    e *= 1.0 / frobenius_norm(e);
    return e;
}

int cmd_check_sqrt(const CheckSqrtOptions& o, const GlobalOptions& g, std::ostream& out,
                   std::ostream& err) {
    if (o.d == 0 || o.d > 256) throw UsageError("--d must lie in [1, 256]");
    if (o.trials == 0) throw UsageError("--trials must be >= 1");
    for (int t : o.t_values) {
        if (t < 1 || t > 100) throw UsageError("--t values must lie in [1, 100]");
    }
    const fs::path dir = prepare_out_dir(g);
    const fs::path path = dir / "check_sqrt.csv";
    std::ofstream csv_out(path);
    if (!csv_out) throw UsageError("cannot write " + path.string());
    csv_out << "t,trial,residual,grad_rel_err\n";

    Rng rng(g.seed.value_or(7));
    constexpr double h = 1e-5;
    std::size_t rows = 0;
    double worst_residual_at_max_t = 0.0;
    const int max_t = *std::max_element(o.t_values.begin(), o.t_values.end());
    for (std::size_t trial = 0; trial < o.trials; ++trial) {
        const Matrix a = random_psd(o.d, rng);
        std::vector<Matrix> directions;
        Vector fd(o.fd_directions);
        for (std::size_t k = 0; k < o.fd_directions; ++k) {
            directions.push_back(random_symmetric_unit(o.d, rng));
            const double plus = trace(eig_sqrt(a + directions[k] * h));
            const double minus = trace(eig_sqrt(a - directions[k] * h));
            fd[k] = (plus - minus) / (2.0 * h);
        }
        for (int t : o.t_values) {
            const SqrtResult ns = newton_schulz_sqrt(a, t);
            double grad_err = 0.0;
            try {
                const Matrix grad = sylvester_grad_eig(ns.y, Matrix::identity(o.d));
                double diff = 0.0;
                for (std::size_t k = 0; k < o.fd_directions; ++k) {
                    double analytic = 0.0;
                    for (std::size_t i = 0; i < grad.size(); ++i) {
                        analytic += grad.data()[i] * directions[k].data()[i];
                    }
                    diff += (analytic - fd[k]) * (analytic - fd[k]);
                }
                grad_err = std::sqrt(diff) / norm(fd);
            } catch (const SingularError&) {
                grad_err = std::numeric_limits<double>::infinity();
            }
            csv_out << t << ',' << trial << ',' << csv::format_double(ns.residual) << ','
                    << csv::format_double(grad_err) << '\n';
            ++rows;
            if (t == max_t) worst_residual_at_max_t = std::max(worst_residual_at_max_t, ns.residual);
        }
        err << "trial " << trial + 1 << "/" << o.trials << " done\n";
    }
    json summary{{"command", "check-sqrt"},
                 {"csv", path.string()},
                 {"rows", rows},
                 {"d", o.d},
                 {"max_t", max_t},
                 {"worst_residual_at_max_t", worst_residual_at_max_t}};
    out << summary.dump() << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// distances

struct DistancesOptions {
    std::string file_x;
    std::string file_y;
    std::string method = "frechet";
    int p = 2;
    std::size_t projections = 512;
    std::size_t candidates = 64;
    std::size_t ascent_steps = 10;
    std::string sqrt_method = "ns";
    int sqrt_iters = 15;
};

int cmd_distances(const DistancesOptions& o, const GlobalOptions& g, std::ostream& out) {
    Matrix x;
    Matrix y;
    try {
        x = csv::read_matrix(o.file_x);
        y = csv::read_matrix(o.file_y);
    } catch (const ConfigError& e) {
        throw UsageError(e.what());
    }
    if (x.cols() != y.cols()) throw UsageError("input files have different widths");
    if (x.rows() == 0 || y.rows() == 0) throw UsageError("input files contain no rows");

    Rng rng(g.seed.value_or(7));
    json result{{"method", o.method}, {"n_x", x.rows()}, {"n_y", y.rows()}, {"d", x.cols()}};
    if (o.method == "frechet") {
        if (x.rows() < 2 || y.rows() < 2) throw UsageError("frechet needs at least 2 rows per file");
        SqrtConfig cfg;
        cfg.iterations = o.sqrt_iters;
        if (o.sqrt_method == "eig") {
            cfg.method = SqrtMethod::eig;
        } else if (o.sqrt_method != "ns") {
            throw UsageError("--sqrt must be ns or eig");
        }
        result["value"] = frechet_distance(estimate_gaussian(x), estimate_gaussian(y), cfg);
    } else {
        if (x.rows() != y.rows()) throw UsageError(o.method + " needs equal row counts");
        if (o.method == "ot") {
            result["p"] = o.p;
            result["value"] = ot_cost(x, y, o.p).cost;
        } else if (o.method == "swg") {
            result["projections"] = o.projections;
            result["value"] = sliced_wasserstein(x, y, o.projections, rng);
        } else if (o.method == "max-swg") {
            const MaxSlicedResult best =
                max_sliced_wasserstein(x, y, o.candidates, o.ascent_steps, rng);
            result["value"] = best.value;
            result["direction"] = best.direction;
        } else {
            throw UsageError("unknown method '" + o.method + "'");
        }
    }
    out << result.dump() << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// sample

struct SampleOptions {
    std::string dataset = "gaussians8";
    std::size_t n = 1000;
    std::optional<double> noise_std;
    std::optional<double> scale;
    bool stratified = false;
    std::string output = "samples.csv";
};

int cmd_sample(const SampleOptions& o, const GlobalOptions& g, std::ostream& out) {
    DatasetSpec spec = default_dataset(dataset_from_string(o.dataset));
    if (o.noise_std) spec.noise_std = *o.noise_std;
    if (o.scale) spec.scale = *o.scale;
    spec.seed = g.seed.value_or(7);
    Rng rng(spec.seed);
    const Matrix samples =
        sample_real(spec, o.n, rng, o.stratified ? ModeOrder::stratified : ModeOrder::random);
    const fs::path path = prepare_out_dir(g) / o.output;
    csv::write_matrix(path, {"x", "y"}, samples);
    out << json{{"command", "sample"}, {"dataset", o.dataset}, {"rows", o.n}, {"csv", path.string()}}
               .dump()
        << '\n';
    return kOk;
}

// ---------------------------------------------------------------------------
// bench

struct BenchOptions {
    std::vector<std::string> methods{"ot", "frechet"};
    std::vector<std::size_t> n_values{64, 128, 256, 512};
    std::size_t d = 64;
    std::size_t trials = 5;
};

int cmd_bench(const BenchOptions& o, const GlobalOptions& g, std::ostream& out, std::ostream& err) {
    std::vector<BenchMethod> methods;
    for (const auto& m : o.methods) methods.push_back(bench_method_from_string(m));
    Rng rng(g.seed.value_or(7));
    err << "benchmarking " << methods.size() << " method(s) over " << o.n_values.size()
        << " batch sizes, d=" << o.d << ", " << o.trials << " trials\n";
    const std::vector<BenchRow> rows = bench_distances(methods, o.n_values, o.d, o.trials, rng);

    const fs::path path = prepare_out_dir(g) / "bench.csv";
    std::ofstream csv_out(path);
    if (!csv_out) throw UsageError("cannot write " + path.string());
    csv_out << kBenchHeader << '\n';
    for (const BenchRow& r : rows) csv_out << format_bench_row(r) << '\n';

    json medians = json::object();
    for (BenchMethod m : methods) {
        json per_n = json::object();
        for (std::size_t n : o.n_values) per_n[std::to_string(n)] = median_total_ms(rows, m, n);
        medians[to_string(m)] = per_n;
    }
    out << json{{"command", "bench"}, {"csv", path.string()}, {"rows", rows.size()},
                {"median_total_ms", medians}}
               .dump()
        << '\n';
    return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Feature-space distributional distances and toy GAN training", "fot"};
    app.footer(
        "Option precedence for train: command-line flag > config file > built-in default.\n"
        "FOT_OUT_DIR supplies the default --out-dir. Exit codes: 0 ok, 2 usage, 3 numerical.");
    app.require_subcommand(1);

    GlobalOptions global;
    if (const char* env = std::getenv("FOT_OUT_DIR")) global.out_dir = env;
    app.add_option("--seed", global.seed, "Seed for every stochastic path");
    app.add_option("--out-dir", global.out_dir, "Output directory (created if absent)");

    TrainOptions train;
    auto* train_cmd = app.add_subcommand("train", "Train a toy GAN on a synthetic 2D dataset");
    train_cmd->add_option("--config", train.config, "JSON config file");
    train_cmd->add_option("--dataset", train.dataset, "gaussians8 | gaussians25 | swissroll");
    train_cmd->add_option("--gen-loss", train.gen_loss, "frechet | ot | swg | max_swg");
    train_cmd->add_option("--steps", train.steps, "Generator steps");
    train_cmd->add_option("--batch-size", train.batch_size, "Mini-batch size N");
    train_cmd->add_option("--d-steps", train.d_steps, "Discriminator steps per generator step");
    train_cmd->add_option("--optimizer", train.optimizer, "adam | sgd");
    train_cmd->add_option("--lr-d", train.lr_d, "Discriminator learning rate");
    train_cmd->add_option("--lr-g", train.lr_g, "Generator learning rate");
    train_cmd->add_option("--beta1", train.beta1, "Adam beta1");
    train_cmd->add_option("--beta2", train.beta2, "Adam beta2");
    train_cmd->add_option("--sqrt-iters", train.sqrt_iters, "Newton-Schulz iterations T");
    train_cmd->add_option("--swg-projections", train.swg_projections, "Sliced projections K");
    train_cmd->add_option("--max-swg-candidates", train.max_swg_candidates,
                          "Random candidate directions for max-sliced");
    train_cmd->add_option("--max-swg-ascent", train.max_swg_ascent,
                          "Ascent steps refining the max-sliced direction");
    train_cmd->add_option("--ot-exponent", train.ot_exponent, "OT cost exponent p (1 or 2)");
    train_cmd->add_option("--z-dim", train.z_dim, "Latent dimension");
    train_cmd->add_option("--noise-std", train.noise_std, "Dataset noise standard deviation");
    train_cmd->add_option("--scale", train.scale, "Dataset scale");
    train_cmd->add_option("--snapshot-every", train.snapshot_every, "Snapshot cadence in steps");
    train_cmd->add_option("--snapshot-points", train.snapshot_points, "Points per snapshot");
    train_cmd->add_flag("--no-timing", train.no_timing,
                        "Write zero timings so metrics.csv is byte-reproducible");

    CheckSqrtOptions check;
    auto* check_cmd = app.add_subcommand("check-sqrt", "Newton-Schulz convergence and gradient check");
    check_cmd->add_option("--d", check.d, "Matrix dimension (<= 256)");
    check_cmd->add_option("--t", check.t_values, "Iteration counts")->delimiter(',');
    check_cmd->add_option("--trials", check.trials, "Random matrices per t");
    check_cmd->add_option("--fd-directions", check.fd_directions,
                          "Random directions for the finite-difference check");

    DistancesOptions dist;
    auto* dist_cmd = app.add_subcommand("distances", "Distance between two CSV sample sets");
    dist_cmd->add_option("--x", dist.file_x, "First CSV (rows are samples)")->required();
    dist_cmd->add_option("--y", dist.file_y, "Second CSV")->required();
    dist_cmd->add_option("--method", dist.method, "frechet | ot | swg | max-swg");
    dist_cmd->add_option("--p", dist.p, "OT exponent (1 or 2)");
    dist_cmd->add_option("--projections", dist.projections, "Sliced projections K");
    dist_cmd->add_option("--candidates", dist.candidates, "Max-sliced candidate directions");
    dist_cmd->add_option("--ascent-steps", dist.ascent_steps, "Max-sliced ascent steps");
    dist_cmd->add_option("--sqrt", dist.sqrt_method, "ns | eig");
    dist_cmd->add_option("--sqrt-iters", dist.sqrt_iters, "Newton-Schulz iterations");

    SampleOptions sample;
    auto* sample_cmd = app.add_subcommand("sample", "Write synthetic dataset samples as CSV");
    sample_cmd->add_option("--dataset", sample.dataset, "gaussians8 | gaussians25 | swissroll");
    sample_cmd->add_option("--n", sample.n, "Number of samples");
    sample_cmd->add_option("--noise-std", sample.noise_std, "Noise standard deviation");
    sample_cmd->add_option("--scale", sample.scale, "Dataset scale");
    sample_cmd->add_flag("--stratified", sample.stratified, "Cycle through modes in order");
    sample_cmd->add_option("--output", sample.output, "File name inside --out-dir");

    BenchOptions bench;
    auto* bench_cmd = app.add_subcommand("bench", "Time OT vs Frechet losses across batch sizes");
    bench_cmd->add_option("--methods", bench.methods, "ot,frechet")->delimiter(',');
    bench_cmd->add_option("--n", bench.n_values, "Batch sizes")->delimiter(',');
    bench_cmd->add_option("--d", bench.d, "Feature dimension");
    bench_cmd->add_option("--trials", bench.trials, "Trials per cell (first is warm-up)");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, err, err);
        return kUsage;
    }

    try {
        if (*train_cmd) return cmd_train(train, global, out, err);
        if (*check_cmd) return cmd_check_sqrt(check, global, out, err);
        if (*dist_cmd) return cmd_distances(dist, global, out);
        if (*sample_cmd) return cmd_sample(sample, global, out);
        if (*bench_cmd) return cmd_bench(bench, global, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n\n";
        const CLI::App* active = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << active->help();
        return kUsage;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const ShapeError& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    } catch (const Error& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kNumerical;
    } catch (const fs::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
    return kUsage;
}

}  // namespace fot::cli
