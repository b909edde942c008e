#include "fot/nn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fot/error.hpp"

namespace fot {

namespace {

constexpr int kCheckpointVersion = 1;

Matrix affine(const Matrix& x, const Layer& layer) {
    Matrix out = matmul(x, layer.weight);
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto row = out.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) row[j] += layer.bias[j];
    }
    return out;
}

Matrix activate(const Matrix& pre, Activation a) {
    Matrix out = pre;
    switch (a) {
        case Activation::relu:
            for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
            break;
        case Activation::sigmoid:
            for (double& v : out.data()) v = 1.0 / (1.0 + std::exp(-v));
            break;
        case Activation::linear:
            break;
    }
    return out;
}

// grad w.r.t. pre-activation given grad w.r.t. activation.
void activation_backward(Matrix& grad, const Matrix& pre, const Matrix& act, Activation a) {
    auto g = grad.data();
    switch (a) {
        case Activation::relu: {
            const auto p = pre.data();
            for (std::size_t k = 0; k < g.size(); ++k) {
                if (!(p[k] > 0.0)) g[k] = 0.0;
            }
            break;
        }
        case Activation::sigmoid: {
            const auto s = act.data();
            for (std::size_t k = 0; k < g.size(); ++k) g[k] *= s[k] * (1.0 - s[k]);
            break;
        }
        case Activation::linear:
            break;
    }
}

ForwardResult run_layers(const MlpParams& params, const Matrix& x, std::size_t count,
                         bool includes_output) {
    if (params.layers.empty()) throw ConfigError("mlp: network has no layers");
    if (x.cols() != params.input_dim()) {
        std::ostringstream msg;
        msg << "mlp_forward: input width " << x.cols() << " != network input " << params.input_dim();
        throw ShapeError(msg.str());
    }
    ForwardResult result;
    result.cache.includes_output = includes_output;
    Matrix current = x;
    for (std::size_t l = 0; l < count; ++l) {
        const bool is_output = l + 1 == params.layers.size();
        const Activation a = is_output ? params.output_activation : params.hidden_activation;
        Matrix pre = affine(current, params.layers[l]);
        Matrix act = activate(pre, a);
        result.cache.inputs.push_back(std::move(current));
        result.cache.pre.push_back(std::move(pre));
        current = act;
        result.cache.activations.push_back(std::move(act));
    }
    result.output = std::move(current);
    return result;
}

}  // namespace

std::size_t MlpParams::input_dim() const {
    return layers.empty() ? 0 : layers.front().weight.rows();
}

std::size_t MlpParams::output_dim() const {
    return layers.empty() ? 0 : layers.back().weight.cols();
}

std::size_t MlpParams::parameter_count() const {
    std::size_t count = 0;
    for (const Layer& l : layers) count += l.weight.size() + l.bias.size();
    return count;
}

void MlpParams::validate() const {
    if (layers.empty()) throw ConfigError("mlp: network has no layers");
    for (std::size_t l = 0; l < layers.size(); ++l) {
        const Layer& layer = layers[l];
        if (layer.bias.size() != layer.weight.cols()) {
            throw ConfigError("mlp: bias length does not match layer width at layer " +
                              std::to_string(l));
        }
        if (l > 0 && layers[l - 1].weight.cols() != layer.weight.rows()) {
            throw ConfigError("mlp: layer dims do not chain at layer " + std::to_string(l));
        }
        if (!all_finite(layer.weight.data()) || !all_finite(layer.bias)) {
            throw ConfigError("mlp: non-finite parameter at layer " + std::to_string(l));
        }
    }
}

MlpParams make_mlp(const std::vector<std::size_t>& widths, Activation output, double init_std,
                   Rng& rng) {
    if (widths.size() < 2) throw ConfigError("make_mlp: need at least input and output widths");
    MlpParams params;
    params.output_activation = output;
    std::normal_distribution<double> normal(0.0, init_std);
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        Layer layer{Matrix(widths[l], widths[l + 1]), Vector(widths[l + 1], 0.0)};
        for (double& w : layer.weight.data()) w = normal(rng);
        params.layers.push_back(std::move(layer));
    }
    return params;
}

MlpParams zeros_like(const MlpParams& params) {
    MlpParams z;
    z.hidden_activation = params.hidden_activation;
    z.output_activation = params.output_activation;
    for (const Layer& l : params.layers) {
        z.layers.push_back({Matrix(l.weight.rows(), l.weight.cols()), Vector(l.bias.size(), 0.0)});
    }
    return z;
}

ForwardResult mlp_forward(const MlpParams& params, const Matrix& x) {
    return run_layers(params, x, params.layers.size(), true);
}

ForwardResult features_forward(const MlpParams& params, const Matrix& x) {
    if (params.layers.size() < 2) {
        throw ConfigError("extract_features: discriminator needs at least one hidden layer");
    }
    return run_layers(params, x, params.layers.size() - 1, false);
}

Matrix extract_features(const MlpParams& params, const Matrix& x) {
    return features_forward(params, x).output;
}

BackwardResult mlp_backward(const MlpParams& params, const ForwardCache& cache,
                            const Matrix& grad_output) {
    const std::size_t depth = cache.pre.size();
    if (depth == 0 || depth > params.layers.size()) throw ShapeError("mlp_backward: bad cache");
    const Matrix& last = cache.activations.back();
    if (grad_output.rows() != last.rows() || grad_output.cols() != last.cols()) {
        std::ostringstream msg;
        msg << "mlp_backward: grad_output is " << grad_output.rows() << "x" << grad_output.cols()
            << ", forward output is " << last.rows() << "x" << last.cols();
        throw ShapeError(msg.str());
    }

    BackwardResult result{zeros_like(params), Matrix()};
    Matrix grad = grad_output;
    for (std::size_t l = depth; l-- > 0;) {
        const bool is_output = l + 1 == params.layers.size();
        const Activation a = is_output ? params.output_activation : params.hidden_activation;
        activation_backward(grad, cache.pre[l], cache.activations[l], a);

        Layer& g = result.param_grads.layers[l];
        g.weight = matmul_tn(cache.inputs[l], grad);
        for (std::size_t i = 0; i < grad.rows(); ++i) {
            const auto row = grad.row(i);
            for (std::size_t j = 0; j < row.size(); ++j) g.bias[j] += row[j];
        }
        grad = matmul(grad, params.layers[l].weight.transpose());
    }
    result.input_grads = std::move(grad);
    return result;
}

BceResult bce_discriminator_loss(const Matrix& d_real, const Matrix& d_fake) {
    if (d_real.cols() != 1 || d_fake.cols() != 1) {
        throw ShapeError("bce_discriminator_loss: expected single-column probabilities");
    }
    if (d_real.rows() == 0 || d_fake.rows() == 0) {
        throw EmptyInputError("bce_discriminator_loss: empty batch");
    }
    auto in_unit = [](double p) { return p > 0.0 && p < 1.0; };
    for (double p : d_real.data()) {
        if (!in_unit(p)) throw DomainError("bce_discriminator_loss: d_real outside (0,1)");
    }
    for (double p : d_fake.data()) {
        if (!in_unit(p)) throw DomainError("bce_discriminator_loss: d_fake outside (0,1)");
    }
    const double br = static_cast<double>(d_real.rows());
    const double bf = static_cast<double>(d_fake.rows());
    BceResult out{0.0, Matrix(d_real.rows(), 1), Matrix(d_fake.rows(), 1)};
    double real_sum = 0.0;
    double fake_sum = 0.0;
    for (std::size_t i = 0; i < d_real.rows(); ++i) {
        const double p = d_real(i, 0);
        real_sum -= std::log(p);
        out.grad_real(i, 0) = -1.0 / (br * p);
    }
    for (std::size_t i = 0; i < d_fake.rows(); ++i) {
        const double p = d_fake(i, 0);
        fake_sum -= std::log1p(-p);
        out.grad_fake(i, 0) = 1.0 / (bf * (1.0 - p));
    }
    out.loss = real_sum / br + fake_sum / bf;
    return out;
}

Matrix clamp_probabilities(Matrix p) {
    for (double& v : p.data()) v = std::clamp(v, kProbabilityClamp, 1.0 - kProbabilityClamp);
    return p;
}

AdamState make_adam_state(const MlpParams& params, const OptimizerConfig& config) {
    return AdamState{config, zeros_like(params), zeros_like(params), 0};
}

void adam_step(MlpParams& params, const MlpParams& grads, AdamState& state) {
    if (grads.layers.size() != params.layers.size()) throw ShapeError("adam_step: layer count mismatch");
    const OptimizerConfig& cfg = state.config;
    ++state.step;
    const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(state.step));
    const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(state.step));

    auto update = [&](std::span<double> p, std::span<const double> g, std::span<double> m,
                      std::span<double> v) {
        if (p.size() != g.size()) throw ShapeError("adam_step: parameter/gradient shape mismatch");
        if (cfg.kind == OptimizerKind::sgd) {
            for (std::size_t k = 0; k < p.size(); ++k) p[k] -= cfg.lr * g[k];
            return;
        }
        for (std::size_t k = 0; k < p.size(); ++k) {
            m[k] = cfg.beta1 * m[k] + (1.0 - cfg.beta1) * g[k];
            v[k] = cfg.beta2 * v[k] + (1.0 - cfg.beta2) * g[k] * g[k];
            const double m_hat = m[k] / bc1;
            const double v_hat = v[k] / bc2;
            p[k] -= cfg.lr * m_hat / (std::sqrt(v_hat) + cfg.eps);
        }
    };
    for (std::size_t l = 0; l < params.layers.size(); ++l) {
        Layer& p = params.layers[l];
        const Layer& g = grads.layers[l];
        update(p.weight.data(), g.weight.data(), state.m.layers[l].weight.data(),
               state.v.layers[l].weight.data());
        update(p.bias, g.bias, state.m.layers[l].bias, state.v.layers[l].bias);
    }
}

std::string to_string(Activation a) {
    switch (a) {
        case Activation::relu: return "relu";
        case Activation::linear: return "linear";
        case Activation::sigmoid: return "sigmoid";
    }
    return "linear";
}

Activation activation_from_string(const std::string& name) {
    if (name == "relu") return Activation::relu;
    if (name == "linear") return Activation::linear;
    if (name == "sigmoid") return Activation::sigmoid;
    throw ConfigError("unknown activation '" + name + "'");
}

std::string to_checkpoint_json(const MlpParams& params) {
    nlohmann::json j;
    j["format"] = "fot-mlp";
    j["version"] = kCheckpointVersion;
    j["hidden_activation"] = to_string(params.hidden_activation);
    j["output_activation"] = to_string(params.output_activation);
    j["layers"] = nlohmann::json::array();
    for (const Layer& l : params.layers) {
        nlohmann::json layer;
        layer["in"] = l.weight.rows();
        layer["out"] = l.weight.cols();
        layer["weight"] = std::vector<double>(l.weight.data().begin(), l.weight.data().end());
        layer["bias"] = l.bias;
        j["layers"].push_back(std::move(layer));
    }
    return j.dump();
}

MlpParams from_checkpoint_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("checkpoint: ") + e.what());
    }
    if (j.value("format", "") != "fot-mlp") throw ConfigError("checkpoint: unknown format");
    if (j.value("version", 0) != kCheckpointVersion) {
        throw ConfigError("checkpoint: unsupported version");
    }
    MlpParams params;
    try {
        params.hidden_activation = activation_from_string(j.at("hidden_activation"));
        params.output_activation = activation_from_string(j.at("output_activation"));
        for (const auto& layer : j.at("layers")) {
            const auto in = layer.at("in").get<std::size_t>();
            const auto out = layer.at("out").get<std::size_t>();
            params.layers.push_back(
                {Matrix(in, out, layer.at("weight").get<std::vector<double>>()),
                 layer.at("bias").get<std::vector<double>>()});
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("checkpoint: ") + e.what());
    } catch (const ShapeError& e) {
        throw ConfigError(std::string("checkpoint: ") + e.what());
    }
    params.validate();
    return params;
}

void save_checkpoint(const std::filesystem::path& path, const MlpParams& params) {
    std::ofstream out(path);
    if (!out) throw ConfigError("checkpoint: cannot open " + path.string() + " for writing");
    out << to_checkpoint_json(params) << '\n';
}

MlpParams load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("checkpoint: cannot open " + path.string());
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_checkpoint_json(buffer.str());
}

}  // namespace fot
