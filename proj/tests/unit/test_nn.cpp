#include <doctest.h>

#include <cmath>
#include <fstream>

#include "fot/error.hpp"
#include "fot/nn.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace fot;

namespace {

double sum_of(const Matrix& m) {
    double s = 0.0;
    for (double v : m.data()) s += v;
    return s;
}

MlpParams scalar_param(double w) {
    MlpParams p;
    p.layers.push_back({Matrix(1, 1, std::vector<double>{w}), Vector{0.0}});
    return p;
}

}  // namespace

TEST_SUITE("nn") {

TEST_CASE("make_mlp shapes and metadata") {
    Rng rng(80);
    const MlpParams p = make_mlp({10, 128, 128, 2}, Activation::linear, 0.02, rng);
    REQUIRE(p.layers.size() == 3);
    CHECK(p.input_dim() == 10);
    CHECK(p.output_dim() == 2);
    CHECK(p.layers[1].weight.rows() == 128);
    CHECK(p.parameter_count() == 10 * 128 + 128 + 128 * 128 + 128 + 128 * 2 + 2);
    for (double b : p.layers[0].bias) CHECK(b == 0.0);
    CHECK_NOTHROW(p.validate());
    CHECK_THROWS_AS((void)make_mlp({3}, Activation::linear, 0.1, rng), ConfigError);
}

TEST_CASE("initial weights have the requested spread") {
    Rng rng(81);
    const MlpParams p = make_mlp({200, 200}, Activation::linear, 0.02, rng);
    double sq = 0.0;
    for (double w : p.layers[0].weight.data()) sq += w * w;
    const double std = std::sqrt(sq / static_cast<double>(p.layers[0].weight.size()));
    CHECK(std == doctest::Approx(0.02).epsilon(0.02));
}

TEST_CASE("validate catches broken chains and non-finite entries") {
    Rng rng(82);
    MlpParams p = make_mlp({3, 4, 1}, Activation::sigmoid, 0.1, rng);
    MlpParams broken = p;
    broken.layers[1].weight = Matrix(5, 1);
    CHECK_THROWS_AS(broken.validate(), ConfigError);
    broken = p;
    broken.layers[0].bias.push_back(0.0);
    CHECK_THROWS_AS(broken.validate(), ConfigError);
    broken = p;
    broken.layers[0].weight.data()[0] = std::nan("");
    CHECK_THROWS_AS(broken.validate(), ConfigError);
    CHECK_THROWS_AS(MlpParams{}.validate(), ConfigError);
}

TEST_CASE("zero network outputs zero") {
    Rng rng(83);
    MlpParams p = zeros_like(make_mlp({3, 5, 2}, Activation::linear, 1.0, rng));
    const ForwardResult r = mlp_forward(p, oracle::gaussian_matrix(4, 3, rng));
    CHECK(r.output == Matrix(4, 2));
}

TEST_CASE("single linear layer is matmul plus bias") {
    Rng rng(84);
    MlpParams p = make_mlp({3, 2}, Activation::linear, 1.0, rng);
    p.layers[0].bias = {0.5, -1.0};
    const Matrix x = oracle::gaussian_matrix(5, 3, rng);
    const Matrix out = mlp_forward(p, x).output;
    const Matrix direct = oracle::triple_loop_matmul(x, p.layers[0].weight);
    for (std::size_t i = 0; i < 5; ++i) {
        CHECK(out(i, 0) == doctest::Approx(direct(i, 0) + 0.5).epsilon(1e-14));
        CHECK(out(i, 1) == doctest::Approx(direct(i, 1) - 1.0).epsilon(1e-14));
    }
}

TEST_CASE("forward pass matches a naive implementation") {
    Rng rng(85);
    for (Activation out : {Activation::linear, Activation::sigmoid}) {
        MlpParams p = make_mlp({4, 16, 16, 3}, out, 0.5, rng);
        for (Layer& l : p.layers) {
            for (double& b : l.bias) b = std::normal_distribution<double>(0.0, 0.1)(rng);
        }
        const Matrix x = oracle::gaussian_matrix(9, 4, rng);
        const ForwardResult r = mlp_forward(p, x);
        CHECK(oracle::max_abs_diff(r.output, oracle::naive_mlp_forward(p, x)) <= 1e-12);
        REQUIRE(r.cache.pre.size() == 3);
        CHECK(r.cache.inputs[0] == x);
        CHECK(r.cache.pre[1].rows() == 9);
        CHECK(r.cache.pre[1].cols() == 16);
        CHECK(r.cache.activations[2] == r.output);
        CHECK(r.cache.includes_output);
        if (out == Activation::sigmoid) {
            for (double v : r.output.data()) CHECK((v > 0.0 && v < 1.0));
        }
    }
    MlpParams p = make_mlp({4, 2}, Activation::linear, 0.5, rng);
    CHECK_THROWS_AS((void)mlp_forward(p, Matrix(2, 5)), ShapeError);
}

TEST_CASE("linear layer backward gives xᵀ·grad") {
    Rng rng(86);
    const MlpParams p = make_mlp({3, 2}, Activation::linear, 1.0, rng);
    const Matrix x = oracle::gaussian_matrix(4, 3, rng);
    const ForwardResult f = mlp_forward(p, x);
    Matrix g(4, 2);
    for (std::size_t i = 0; i < 4; ++i) g(i, i % 2) = 1.0;
    const BackwardResult b = mlp_backward(p, f.cache, g);
    CHECK(oracle::max_abs_diff(b.param_grads.layers[0].weight,
                               oracle::triple_loop_matmul(oracle::naive_transpose(x), g)) <= 1e-14);
    CHECK(b.param_grads.layers[0].bias == Vector{2.0, 2.0});
    CHECK(oracle::max_abs_diff(b.input_grads,
                               oracle::triple_loop_matmul(g, oracle::naive_transpose(p.layers[0].weight))) <=
          1e-14);
    CHECK_THROWS_AS((void)mlp_backward(p, f.cache, Matrix(4, 3)), ShapeError);
}

TEST_CASE("dead ReLU layer blocks the gradient") {
    Rng rng(87);
    MlpParams p = make_mlp({2, 3, 1}, Activation::linear, 1.0, rng);
    // Large negative bias keeps every hidden pre-activation below zero.
    p.layers[0].bias = {-100.0, -100.0, -100.0};
    const Matrix x = oracle::gaussian_matrix(5, 2, rng);
    const ForwardResult f = mlp_forward(p, x);
    Matrix g(5, 1);
    for (double& v : g.data()) v = 1.0;
    const BackwardResult b = mlp_backward(p, f.cache, g);
    CHECK(b.param_grads.layers[0].weight == Matrix(2, 3));
    CHECK(b.param_grads.layers[0].bias == Vector(3, 0.0));
    CHECK(b.input_grads == Matrix(5, 2));
    // ReLU at exactly zero passes nothing.
    p.layers[0].bias = {0.0, 0.0, 0.0};
    p.layers[0].weight = Matrix(2, 3);
    const BackwardResult at_zero = mlp_backward(p, mlp_forward(p, x).cache, g);
    CHECK(at_zero.param_grads.layers[0].bias == Vector(3, 0.0));
}

TEST_CASE("parameter gradients of sum(output) match finite differences") {
    Rng rng(88);
    for (Activation out : {Activation::linear, Activation::sigmoid}) {
        for (int trial = 0; trial < 3; ++trial) {
            MlpParams p = make_mlp({3, 6, 5, 2}, out, 0.6, rng);
            for (Layer& l : p.layers) {
                for (double& b : l.bias) b = std::normal_distribution<double>(0.0, 0.2)(rng);
            }
            const Matrix x = oracle::gaussian_matrix(7, 3, rng);
            const ForwardResult f = mlp_forward(p, x);
            Matrix ones(7, 2);
            for (double& v : ones.data()) v = 1.0;
            const BackwardResult b = mlp_backward(p, f.cache, ones);
            const auto numeric = oracle::parameter_fd(
                [&](const MlpParams& q) { return sum_of(mlp_forward(q, x).output); }, p, 1e-5);
            CHECK(oracle::max_rel_error(oracle::flatten(b.param_grads), numeric) <= 1e-5);
            const Matrix input_fd = oracle::finite_difference(
                [&](const Matrix& xx) { return sum_of(mlp_forward(p, xx).output); }, x, 1e-5);
            CHECK(oracle::max_rel_error(b.input_grads, input_fd) <= 1e-5);
        }
    }
}

TEST_CASE("features are the last hidden activations") {
    Rng rng(89);
    const MlpParams p = make_mlp({2, 8, 6, 1}, Activation::sigmoid, 0.5, rng);
    const Matrix x = oracle::gaussian_matrix(4, 2, rng);
    const Matrix feats = extract_features(p, x);
    CHECK(feats.cols() == 6);
    CHECK(feats == mlp_forward(p, x).cache.activations[1]);
    const ForwardResult ff = features_forward(p, x);
    CHECK_FALSE(ff.cache.includes_output);
    CHECK(ff.cache.pre.size() == 2);

    Matrix twin(2, 2);
    twin(0, 0) = twin(1, 0) = 0.3;
    twin(0, 1) = twin(1, 1) = -1.2;
    const Matrix tf = extract_features(p, twin);
    for (std::size_t j = 0; j < 6; ++j) CHECK(tf(0, j) == tf(1, j));

    CHECK_THROWS_AS((void)extract_features(make_mlp({2, 1}, Activation::sigmoid, 0.5, rng), x),
                    ConfigError);
}

TEST_CASE("constructed weights reproduce the input in feature space") {
    // Hidden units carry +x and −x; ReLU keeps one of each pair, and the
    // second hidden layer recombines them.
    MlpParams p;
    p.layers.push_back({Matrix::from_rows({{1, -1, 0, 0}, {0, 0, 1, -1}}), Vector(4, 0.0)});
    p.layers.push_back({Matrix::from_rows({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}),
                        Vector(4, 0.0)});
    p.layers.push_back({Matrix(4, 1), Vector(1, 0.0)});
    p.output_activation = Activation::sigmoid;
    Rng rng(90);
    const Matrix x = oracle::gaussian_matrix(10, 2, rng);
    const Matrix f = extract_features(p, x);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(f(i, 0) - f(i, 1) == doctest::Approx(x(i, 0)).epsilon(1e-15));
        CHECK(f(i, 2) - f(i, 3) == doctest::Approx(x(i, 1)).epsilon(1e-15));
    }
}

TEST_CASE("backward through a features cache") {
    Rng rng(91);
    const MlpParams p = make_mlp({2, 5, 4, 1}, Activation::sigmoid, 0.7, rng);
    const Matrix x = oracle::gaussian_matrix(6, 2, rng);
    const ForwardResult ff = features_forward(p, x);
    Matrix g(6, 4);
    for (double& v : g.data()) v = 1.0;
    const BackwardResult b = mlp_backward(p, ff.cache, g);
    // The output layer was not evaluated, so it gets nothing.
    CHECK(b.param_grads.layers[2].weight == Matrix(4, 1));
    CHECK(b.param_grads.layers[2].bias == Vector(1, 0.0));
    const Matrix numeric = oracle::finite_difference(
        [&](const Matrix& xx) { return sum_of(extract_features(p, xx)); }, x, 1e-5);
    CHECK(oracle::max_rel_error(b.input_grads, numeric) <= 1e-5);
}

TEST_CASE("BCE examples") {
    Matrix half(4, 1);
    for (double& v : half.data()) v = 0.5;
    const BceResult r = bce_discriminator_loss(half, half);
    CHECK(r.loss == doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-15));
    CHECK(r.grad_real(0, 0) == doctest::Approx(-0.5));
    CHECK(r.grad_fake(0, 0) == doctest::Approx(0.5));

    Matrix good(3, 1);
    Matrix bad(3, 1);
    for (double& v : good.data()) v = 1.0 - 1e-9;
    for (double& v : bad.data()) v = 1e-9;
    CHECK(bce_discriminator_loss(good, bad).loss <= 1e-8);

    CHECK_THROWS_AS((void)bce_discriminator_loss(Matrix(2, 1), half), DomainError);
    Matrix one(2, 1);
    one(0, 0) = 1.0;
    one(1, 0) = 0.5;
    CHECK_THROWS_AS((void)bce_discriminator_loss(half, one), DomainError);
    CHECK_THROWS_AS((void)bce_discriminator_loss(Matrix(2, 2), half), ShapeError);
    CHECK_THROWS_AS((void)bce_discriminator_loss(Matrix(0, 1), half), EmptyInputError);
}

TEST_CASE("BCE gradients match finite differences") {
    Rng rng(92);
    std::uniform_real_distribution<double> u(0.05, 0.95);
    Matrix real(6, 1);
    Matrix fake(9, 1);
    for (double& v : real.data()) v = u(rng);
    for (double& v : fake.data()) v = u(rng);
    const BceResult r = bce_discriminator_loss(real, fake);
    const Matrix nr = oracle::finite_difference(
        [&](const Matrix& m) { return bce_discriminator_loss(m, fake).loss; }, real, 1e-6);
    const Matrix nf = oracle::finite_difference(
        [&](const Matrix& m) { return bce_discriminator_loss(real, m).loss; }, fake, 1e-6);
    CHECK(oracle::max_rel_error(r.grad_real, nr) <= 1e-7);
    CHECK(oracle::max_rel_error(r.grad_fake, nf) <= 1e-7);
}

TEST_CASE("probability clamp") {
    const Matrix c = clamp_probabilities(Matrix::from_rows({{0.0}, {1.0}, {0.3}}));
    CHECK(c(0, 0) == kProbabilityClamp);
    CHECK(c(1, 0) == 1.0 - kProbabilityClamp);
    CHECK(c(2, 0) == 0.3);
}

TEST_CASE("Adam leaves parameters alone under zero gradients") {
    Rng rng(93);
    MlpParams p = make_mlp({3, 4, 2}, Activation::linear, 0.5, rng);
    const MlpParams before = p;
    AdamState state = make_adam_state(p, {});
    for (int i = 0; i < 5; ++i) adam_step(p, zeros_like(p), state);
    CHECK(p == before);
    CHECK(state.step == 5);
}

TEST_CASE("Adam step approaches lr under a constant gradient") {
    MlpParams p = scalar_param(0.0);
    MlpParams g = scalar_param(3.0);
    AdamState state = make_adam_state(p, {OptimizerKind::adam, 0.01, 0.5, 0.999, 1e-8});
    double previous = 0.0;
    double last_step = 0.0;
    for (int i = 0; i < 200; ++i) {
        adam_step(p, g, state);
        last_step = previous - p.layers[0].weight(0, 0);
        previous = p.layers[0].weight(0, 0);
    }
    CHECK(last_step == doctest::Approx(0.01).epsilon(1e-6));
}

TEST_CASE("Adam scalar trajectory by hand") {
    MlpParams p = scalar_param(1.0);
    AdamState state = make_adam_state(p, {OptimizerKind::adam, 0.1, 0.5, 0.999, 1e-8});
    const double expected[] = {0.9000000005, 0.9000000005, 0.813632812608934};
    const double grads[] = {2.0, -1.0, 4.0};
    for (int i = 0; i < 3; ++i) {
        adam_step(p, scalar_param(grads[i]), state);
        CHECK(p.layers[0].weight(0, 0) == doctest::Approx(expected[i]).epsilon(1e-14));
        CHECK(p.layers[0].bias[0] == 0.0);
    }
}

TEST_CASE("SGD kind is a plain gradient step") {
    MlpParams p = scalar_param(1.0);
    AdamState state = make_adam_state(p, {OptimizerKind::sgd, 0.1});
    adam_step(p, scalar_param(2.0), state);
    CHECK(p.layers[0].weight(0, 0) == doctest::Approx(0.8));
    CHECK(state.m.layers[0].weight(0, 0) == 0.0);
    CHECK_THROWS_AS(adam_step(p, MlpParams{}, state), ShapeError);
}

TEST_CASE("checkpoint round trip is exact") {
    Rng rng(94);
    const MlpParams p = make_mlp({2, 7, 3, 1}, Activation::sigmoid, 0.3, rng);
    CHECK(from_checkpoint_json(to_checkpoint_json(p)) == p);
    const auto dir = testing_support::scratch_dir("checkpoint");
    save_checkpoint(dir / "d.json", p);
    CHECK(load_checkpoint(dir / "d.json") == p);
    CHECK_THROWS_AS((void)load_checkpoint(dir / "missing.json"), ConfigError);
}

TEST_CASE("checkpoint rejects malformed records") {
    CHECK_THROWS_AS((void)from_checkpoint_json("not json"), ConfigError);
    CHECK_THROWS_AS((void)from_checkpoint_json(R"({"format":"other","version":1})"), ConfigError);
    CHECK_THROWS_AS((void)from_checkpoint_json(R"({"format":"fot-mlp","version":9})"), ConfigError);
    CHECK_THROWS_AS(
        (void)from_checkpoint_json(
            R"({"format":"fot-mlp","version":1,"hidden_activation":"relu","output_activation":"linear",)"
            R"("layers":[{"in":2,"out":1,"weight":[1.0],"bias":[0.0]}]})"),
        ConfigError);
    CHECK_THROWS_AS(
        (void)from_checkpoint_json(
            R"({"format":"fot-mlp","version":1,"hidden_activation":"tanh","output_activation":"linear",)"
            R"("layers":[{"in":1,"out":1,"weight":[1.0],"bias":[0.0]}]})"),
        ConfigError);
}

TEST_CASE("activation names") {
    for (Activation a : {Activation::relu, Activation::linear, Activation::sigmoid}) {
        CHECK(activation_from_string(to_string(a)) == a);
    }
    CHECK_THROWS_AS((void)activation_from_string("tanh"), ConfigError);
}

}  // TEST_SUITE
