#include "crisp/model.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "crisp/errors.hpp"
#include "crisp/rng.hpp"

namespace crisp {

namespace {

// Row counts below this run serially; per-batch kernels on tiny mini-batches
// would otherwise pay more in thread startup than they save.
constexpr std::size_t kParallelMinWork = 4096;

constexpr double kProbCeil = 1.0 - 0x1.0p-53;
constexpr double kProbFloor = std::numeric_limits<double>::min();

Layer init_layer(std::size_t out, std::size_t in, Rng& rng) {
    Layer layer;
    layer.weights = Matrix(out, in);
    layer.bias.assign(out, 0.0);
    const double bound = 1.0 / std::sqrt(static_cast<double>(in));
    for (double& w : layer.weights.values()) w = rng.uniform(-bound, bound);
    for (double& b : layer.bias) b = rng.uniform(-bound, bound);
    return layer;
}

// out[n x rows(W)] = X[n x cols(W)] * W^T + b. Each output entry is an
// independent serial dot product, so the result does not depend on the
// thread count.
void affine_forward(const Matrix& X, const Layer& layer, Matrix& out) {
    const std::size_t n = X.rows();
    const std::size_t in = layer.weights.cols();
    const std::size_t units = layer.weights.rows();
#pragma omp parallel for schedule(static) if (n * units * in >= kParallelMinWork)
    for (std::size_t r = 0; r < n; ++r) {
        const double* x = X.row(r);
        for (std::size_t o = 0; o < units; ++o) {
            const double* w = layer.weights.row(o);
            double acc = layer.bias[o];
            for (std::size_t i = 0; i < in; ++i) acc += w[i] * x[i];
            out(r, o) = acc;
        }
    }
}

void relu_inplace(Matrix& m) {
    for (double& v : m.values())
        if (v < 0.0) v = 0.0;
}

// dW[o][i] = sum_r delta[r][o] * input[r][i], serial over r per entry.
void accumulate_affine_grads(const Matrix& input, const Matrix& delta, Layer& grad) {
    const std::size_t n = input.rows();
    const std::size_t in = input.cols();
    const std::size_t units = delta.cols();
#pragma omp parallel for collapse(2) schedule(static) if (units * in * n >= kParallelMinWork)
    for (std::size_t o = 0; o < units; ++o) {
        for (std::size_t i = 0; i < in; ++i) {
            double acc = 0.0;
            for (std::size_t r = 0; r < n; ++r) acc += delta(r, o) * input(r, i);
            grad.weights(o, i) = acc;
        }
    }
    for (std::size_t o = 0; o < units; ++o) {
        double acc = 0.0;
        for (std::size_t r = 0; r < n; ++r) acc += delta(r, o);
        grad.bias[o] = acc;
    }
}

void check_finite_params(const Classifier& model) {
    for (const auto& layer : model.layers) {
        for (double w : layer.weights.values())
            if (!std::isfinite(w)) throw ParseError("non-finite parameter");
        for (double b : layer.bias)
            if (!std::isfinite(b)) throw ParseError("non-finite parameter");
    }
}

}  // namespace

double stable_sigmoid(double logit) {
    double p;
    if (logit >= 0.0) {
        p = 1.0 / (1.0 + std::exp(-logit));
    } else {
        const double e = std::exp(logit);
        p = e / (1.0 + e);
    }
    if (p > kProbCeil) return kProbCeil;
    if (p < kProbFloor) return kProbFloor;
    return p;
}

std::vector<std::span<double>> Classifier::parameter_spans() {
    std::vector<std::span<double>> spans;
    for (auto& layer : layers) {
        spans.emplace_back(layer.weights.values());
        spans.emplace_back(layer.bias);
    }
    return spans;
}

std::vector<std::span<const double>> Classifier::parameter_spans() const {
    std::vector<std::span<const double>> spans;
    for (const auto& layer : layers) {
        spans.emplace_back(layer.weights.values());
        spans.emplace_back(layer.bias);
    }
    return spans;
}

std::vector<std::span<const double>> GradientSet::parameter_spans() const {
    std::vector<std::span<const double>> spans;
    for (const auto& layer : layers) {
        spans.emplace_back(layer.weights.values());
        spans.emplace_back(layer.bias);
    }
    return spans;
}

Classifier make_linear(std::size_t q, std::size_t c, std::uint64_t seed) {
    if (q < 1 || c < 1) throw std::invalid_argument("model dims must be >= 1");
    Rng rng(seed);
    Classifier model;
    model.layer_dims = {q, c};
    model.layers.push_back(init_layer(c, q, rng));
    return model;
}

Classifier make_one_hidden(std::size_t q, std::size_t h, std::size_t c, std::uint64_t seed) {
    if (q < 1 || h < 1 || c < 1) throw std::invalid_argument("model dims must be >= 1");
    Rng rng(seed);
    Classifier model;
    model.layer_dims = {q, h, c};
    model.layers.push_back(init_layer(h, q, rng));
    model.layers.push_back(init_layer(c, h, rng));
    return model;
}

GradientSet zero_gradients(const Classifier& model) {
    GradientSet grads;
    for (const auto& layer : model.layers) {
        Layer g;
        g.weights = Matrix(layer.weights.rows(), layer.weights.cols());
        g.bias.assign(layer.bias.size(), 0.0);
        grads.layers.push_back(std::move(g));
    }
    return grads;
}

Matrix forward_logits(const Classifier& model, const Matrix& X) {
    if (X.cols() != model.input_dim())
        throw std::invalid_argument("forward: feature width does not match model input");
    for (double v : X.values())
        if (!std::isfinite(v)) throw std::invalid_argument("forward: non-finite input");

    if (!model.has_hidden()) {
        Matrix logits(X.rows(), model.output_dim());
        affine_forward(X, model.layers[0], logits);
        return logits;
    }
    Matrix hidden(X.rows(), model.layer_dims[1]);
    affine_forward(X, model.layers[0], hidden);
    relu_inplace(hidden);
    Matrix logits(X.rows(), model.output_dim());
    affine_forward(hidden, model.layers[1], logits);
    return logits;
}

Matrix forward_probs(const Classifier& model, const Matrix& X) {
    Matrix probs = forward_logits(model, X);
    for (double& v : probs.values()) v = stable_sigmoid(v);
    return probs;
}

GradientSet backward(const Classifier& model, const Matrix& X, const Matrix& upstream) {
    if (upstream.rows() != X.rows() || upstream.cols() != model.output_dim())
        throw std::invalid_argument("backward: upstream shape mismatch");

    GradientSet grads = zero_gradients(model);
    if (!model.has_hidden()) {
        accumulate_affine_grads(X, upstream, grads.layers[0]);
        return grads;
    }

    Matrix pre(X.rows(), model.layer_dims[1]);
    affine_forward(X, model.layers[0], pre);
    Matrix hidden = pre;
    relu_inplace(hidden);
    accumulate_affine_grads(hidden, upstream, grads.layers[1]);

    // delta_hidden[r][k] = sum_o upstream[r][o] W2[o][k], gated by the
    // rectifier (derivative 0 at exactly 0).
    const auto& w2 = model.layers[1].weights;
    const std::size_t n = X.rows();
    const std::size_t h = model.layer_dims[1];
    const std::size_t c = model.output_dim();
    Matrix delta_hidden(n, h);
#pragma omp parallel for schedule(static) if (n * h * c >= kParallelMinWork)
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t k = 0; k < h; ++k) {
            if (pre(r, k) <= 0.0) continue;
            double acc = 0.0;
            for (std::size_t o = 0; o < c; ++o) acc += upstream(r, o) * w2(o, k);
            delta_hidden(r, k) = acc;
        }
    }
    accumulate_affine_grads(X, delta_hidden, grads.layers[0]);
    return grads;
}

void save_checkpoint(const Classifier& model, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open checkpoint for writing: " + path);
    out << "crisp-checkpoint 1\n";
    out << "dims";
    for (std::size_t d : model.layer_dims) out << ' ' << d;
    out << '\n';
    char buf[40];
    for (const auto& layer : model.layers) {
        for (std::size_t o = 0; o < layer.weights.rows(); ++o) {
            for (std::size_t i = 0; i < layer.weights.cols(); ++i) {
                std::snprintf(buf, sizeof(buf), "%a", layer.weights(o, i));
                out << buf << (i + 1 == layer.weights.cols() ? "" : " ");
            }
            out << '\n';
        }
        for (std::size_t o = 0; o < layer.bias.size(); ++o) {
            std::snprintf(buf, sizeof(buf), "%a", layer.bias[o]);
            out << buf << (o + 1 == layer.bias.size() ? "" : " ");
        }
        out << '\n';
    }
    if (!out) throw ParseError("failed writing checkpoint: " + path);
}

Classifier load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open checkpoint: " + path);
    std::string magic;
    int version = 0;
    if (!(in >> magic >> version) || magic != "crisp-checkpoint")
        throw ParseError("not a checkpoint file: " + path);
    if (version != 1)
        throw ParseError("unsupported checkpoint version " + std::to_string(version));

    std::string key;
    if (!(in >> key) || key != "dims") throw ParseError("truncated checkpoint: missing dims");
    std::string rest;
    std::getline(in, rest);
    std::istringstream ds(rest);
    std::vector<std::size_t> dims;
    std::size_t d = 0;
    while (ds >> d) dims.push_back(d);
    if (dims.size() != 2 && dims.size() != 3)
        throw ParseError("checkpoint must have 2 or 3 layer dims");
    for (std::size_t dim : dims)
        if (dim < 1) throw ParseError("checkpoint layer dims must be >= 1");

    // Values are written with %a; stream extraction does not accept
    // hexfloat, so parse tokens through strtod.
    auto read_value = [&in, &path](double& out) {
        std::string tok;
        if (!(in >> tok)) throw ParseError("truncated checkpoint: " + path);
        char* end = nullptr;
        out = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size())
            throw ParseError("malformed checkpoint value '" + tok + "'");
    };

    Classifier model;
    model.layer_dims = dims;
    for (std::size_t li = 0; li + 1 < dims.size(); ++li) {
        Layer layer;
        layer.weights = Matrix(dims[li + 1], dims[li]);
        layer.bias.assign(dims[li + 1], 0.0);
        for (double& w : layer.weights.values()) read_value(w);
        for (double& b : layer.bias) read_value(b);
        model.layers.push_back(std::move(layer));
    }
    check_finite_params(model);
    return model;
}

}  // namespace crisp
