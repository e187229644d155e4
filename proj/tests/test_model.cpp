#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "crisp/errors.hpp"
#include "crisp/model.hpp"
#include "crisp/rng.hpp"
#include "test_util.hpp"

using namespace crisp;

TEST_CASE("zero-initialized linear model emits zero logits") {
    Classifier model = make_linear(3, 2, 0);
    for (auto span : model.parameter_spans())
        for (double& v : span) v = 0.0;
    Matrix X(2, 3);
    X(0, 0) = 1.0;
    X(1, 2) = -4.0;
    const Matrix logits = forward_logits(model, X);
    for (double v : logits.values()) CHECK(v == 0.0);
}

TEST_CASE("identity-weight linear model reproduces its input") {
    Classifier model = make_linear(2, 2, 0);
    model.layers[0].weights(0, 0) = 1.0;
    model.layers[0].weights(0, 1) = 0.0;
    model.layers[0].weights(1, 0) = 0.0;
    model.layers[0].weights(1, 1) = 1.0;
    model.layers[0].bias = {0.0, 0.0};
    Matrix X(1, 2);
    X(0, 0) = 2.0;
    X(0, 1) = -3.0;
    const Matrix logits = forward_logits(model, X);
    CHECK(logits(0, 0) == 2.0);
    CHECK(logits(0, 1) == -3.0);
}

TEST_CASE("hidden-layer forward matches scalar arithmetic") {
    // q=2, h=2, c=1; weights chosen so the rectifier clips one unit.
    Classifier model = make_one_hidden(2, 2, 1, 0);
    model.layers[0].weights(0, 0) = 0.5;
    model.layers[0].weights(0, 1) = -1.0;
    model.layers[0].weights(1, 0) = 1.0;
    model.layers[0].weights(1, 1) = 2.0;
    model.layers[0].bias = {0.1, -0.2};
    model.layers[1].weights(0, 0) = 2.0;
    model.layers[1].weights(0, 1) = -3.0;
    model.layers[1].bias = {0.25};
    Matrix X(1, 2);
    X(0, 0) = 1.0;
    X(0, 1) = 1.0;
    // pre = (0.5 - 1.0 + 0.1, 1.0 + 2.0 - 0.2) = (-0.4, 2.8); relu -> (0, 2.8)
    // logit = 2*0 - 3*2.8 + 0.25 = -8.15
    const Matrix logits = forward_logits(model, X);
    CHECK(logits(0, 0) == doctest::Approx(-8.15).epsilon(1e-12));
}

TEST_CASE("sigmoid outputs stay strictly inside (0,1)") {
    CHECK(stable_sigmoid(0.0) == 0.5);
    CHECK(stable_sigmoid(40.0) >= 1.0 - 1e-15);
    CHECK(stable_sigmoid(40.0) < 1.0);
    CHECK(stable_sigmoid(-40.0) > 0.0);
    CHECK(stable_sigmoid(500.0) < 1.0);
    CHECK(stable_sigmoid(-500.0) > 0.0);
    CHECK(stable_sigmoid(-0.5) == doctest::Approx(1.0 / (1.0 + std::exp(0.5))).epsilon(1e-12));

    Classifier model = make_linear(1, 1, 3);
    Matrix X(1, 1);
    X(0, 0) = 1e6;  // drive the logit far into saturation
    const Matrix probs = forward_probs(model, X);
    CHECK(probs(0, 0) > 0.0);
    CHECK(probs(0, 0) < 1.0);
}

TEST_CASE("zero upstream gives zero gradients") {
    Classifier model = make_one_hidden(3, 4, 2, 1);
    Matrix X(5, 3);
    Rng rng(2);
    for (double& v : X.values()) v = rng.uniform(-1.0, 1.0);
    const GradientSet grads = backward(model, X, Matrix(5, 2));
    for (auto span : grads.parameter_spans())
        for (double v : span) CHECK(v == 0.0);
}

TEST_CASE("linear single-sample gradient is the outer product") {
    Classifier model = make_linear(3, 2, 4);
    Matrix X(1, 3);
    X(0, 0) = 0.5;
    X(0, 1) = -1.5;
    X(0, 2) = 2.0;
    Matrix upstream(1, 2);
    upstream(0, 0) = 0.7;
    upstream(0, 1) = -0.2;
    const GradientSet grads = backward(model, X, upstream);
    for (std::size_t o = 0; o < 2; ++o) {
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(grads.layers[0].weights(o, i) ==
                  doctest::Approx(upstream(0, o) * X(0, i)).epsilon(1e-15));
        CHECK(grads.layers[0].bias[o] == doctest::Approx(upstream(0, o)).epsilon(1e-15));
    }
}

TEST_CASE("backward matches central finite differences") {
    // Scalar probe L = sum w .* logits, so upstream == w exactly.
    for (int arch = 0; arch < 2; ++arch) {
        Classifier model = arch == 0 ? make_linear(4, 3, 7) : make_one_hidden(4, 5, 3, 7);
        Rng rng(100 + arch);
        Matrix X(6, 4);
        for (double& v : X.values()) v = rng.uniform(-1.0, 1.0);
        Matrix w(6, 3);
        for (double& v : w.values()) v = rng.uniform(-1.0, 1.0);

        const GradientSet analytic = backward(model, X, w);
        auto loss = [&]() {
            const Matrix logits = forward_logits(model, X);
            double total = 0.0;
            for (std::size_t i = 0; i < logits.values().size(); ++i)
                total += w.values()[i] * logits.values()[i];
            return total;
        };
        const double worst = test_util::max_grad_rel_error(model, analytic, loss, 1e-5);
        CHECK(worst <= 1e-4);
    }
}

TEST_CASE("forward is deterministic for identical inputs") {
    Classifier model = make_one_hidden(8, 6, 4, 9);
    Rng rng(5);
    Matrix X(32, 8);
    for (double& v : X.values()) v = rng.normal();
    const Matrix a = forward_logits(model, X);
    const Matrix b = forward_logits(model, X);
    CHECK(a == b);
}

TEST_CASE("checkpoint round-trips bit-exactly") {
    const Classifier model = make_one_hidden(5, 4, 3, 42);
    const std::string path = test_util::temp_path("ckpt_roundtrip.txt");
    save_checkpoint(model, path);
    const Classifier loaded = load_checkpoint(path);
    REQUIRE(loaded.layer_dims == model.layer_dims);
    for (std::size_t li = 0; li < model.layers.size(); ++li) {
        CHECK(loaded.layers[li].weights == model.layers[li].weights);
        CHECK(loaded.layers[li].bias == model.layers[li].bias);
    }
    std::filesystem::remove(path);
}

TEST_CASE("checkpoint loader rejects bad files") {
    const std::string dir = test_util::temp_path("");

    const std::string bad_version = dir + "ckpt_v99.txt";
    std::ofstream(bad_version) << "crisp-checkpoint 99\ndims 2 1\n0 0\n0\n";
    CHECK_THROWS_WITH_AS(load_checkpoint(bad_version), "unsupported checkpoint version 99",
                         ParseError);

    const std::string nan_file = dir + "ckpt_nan.txt";
    std::ofstream(nan_file) << "crisp-checkpoint 1\ndims 2 1\nnan 0x1p+0\n0x1p-1\n";
    CHECK_THROWS_WITH_AS(load_checkpoint(nan_file), "non-finite parameter", ParseError);

    const std::string truncated = dir + "ckpt_short.txt";
    std::ofstream(truncated) << "crisp-checkpoint 1\ndims 2 1\n0x1p+0\n";
    CHECK_THROWS_AS(load_checkpoint(truncated), ParseError);

    CHECK_THROWS_AS(load_checkpoint(dir + "does_not_exist.txt"), ParseError);

    std::filesystem::remove(bad_version);
    std::filesystem::remove(nan_file);
    std::filesystem::remove(truncated);
}
