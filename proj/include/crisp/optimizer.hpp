#pragma once

#include <span>
#include <vector>

namespace crisp {

struct AdamConfig {
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double epsilon = 1e-8;
    double weight_decay = 0.0;  // decoupled, applied directly to parameters
};

// Adaptive moment estimation with bias correction. Moment buffers are laid
// out to match the parameter spans passed at construction; the step count is
// shared across all spans.
class AdamOptimizer {
public:
    AdamOptimizer(AdamConfig cfg, const std::vector<std::span<double>>& params);

    void step(const std::vector<std::span<double>>& params,
              const std::vector<std::span<const double>>& grads);

    long step_count() const { return t_; }

private:
    AdamConfig cfg_;
    std::vector<std::vector<double>> m_, v_;
    long t_ = 0;
};

}  // namespace crisp
