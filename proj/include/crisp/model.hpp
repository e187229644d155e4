#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "crisp/matrix.hpp"

namespace crisp {

// Numerically stable logistic function, clamped to the open interval (0, 1)
// so downstream ratios and logs stay finite for any finite logit.
double stable_sigmoid(double logit);

struct Layer {
    Matrix weights;            // out x in
    std::vector<double> bias;  // out
};

// Shallow multi-label classifier: either linear (q -> c) or one hidden
// rectifier layer (q -> h -> c). Produces logits; probabilities are the
// elementwise sigmoid.
struct Classifier {
    std::vector<std::size_t> layer_dims;  // [q, c] or [q, h, c]
    std::vector<Layer> layers;

    std::size_t input_dim() const { return layer_dims.front(); }
    std::size_t output_dim() const { return layer_dims.back(); }
    bool has_hidden() const { return layer_dims.size() == 3; }

    // Mutable views over every parameter array, in a fixed order shared with
    // GradientSet; this is the optimizer's interface.
    std::vector<std::span<double>> parameter_spans();
    std::vector<std::span<const double>> parameter_spans() const;
};

// Seeded uniform init in [-1/sqrt(fan_in), +1/sqrt(fan_in)].
Classifier make_linear(std::size_t q, std::size_t c, std::uint64_t seed);
Classifier make_one_hidden(std::size_t q, std::size_t h, std::size_t c, std::uint64_t seed);

// Parameter gradients, shape-congruent with the classifier.
struct GradientSet {
    std::vector<Layer> layers;

    std::vector<std::span<const double>> parameter_spans() const;
};

GradientSet zero_gradients(const Classifier& model);

Matrix forward_logits(const Classifier& model, const Matrix& X);
Matrix forward_probs(const Classifier& model, const Matrix& X);

// Gradient of sum_i L_i w.r.t. all parameters given upstream = dL/dlogits
// (n x c). Summation over the batch runs in a fixed order, so the result is
// identical for any thread count.
GradientSet backward(const Classifier& model, const Matrix& X, const Matrix& upstream);

// Versioned text checkpoint; exact layout documented in the README.
// Round-trips parameters bit-exactly.
void save_checkpoint(const Classifier& model, const std::string& path);
Classifier load_checkpoint(const std::string& path);

}  // namespace crisp
