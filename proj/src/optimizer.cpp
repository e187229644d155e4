#include "crisp/optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace crisp {

AdamOptimizer::AdamOptimizer(AdamConfig cfg, const std::vector<std::span<double>>& params)
    : cfg_(cfg) {
    for (const auto& span : params) {
        m_.emplace_back(span.size(), 0.0);
        v_.emplace_back(span.size(), 0.0);
    }
}

void AdamOptimizer::step(const std::vector<std::span<double>>& params,
                         const std::vector<std::span<const double>>& grads) {
    if (params.size() != m_.size() || grads.size() != m_.size())
        throw std::invalid_argument("optimizer: span arity mismatch");
    ++t_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, double(t_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, double(t_));
    for (std::size_t s = 0; s < params.size(); ++s) {
        auto& m = m_[s];
        auto& v = v_[s];
        auto p = params[s];
        auto g = grads[s];
        if (p.size() != m.size() || g.size() != m.size())
            throw std::invalid_argument("optimizer: span size mismatch");
        for (std::size_t i = 0; i < p.size(); ++i) {
            m[i] = cfg_.beta1 * m[i] + (1.0 - cfg_.beta1) * g[i];
            v[i] = cfg_.beta2 * v[i] + (1.0 - cfg_.beta2) * g[i] * g[i];
            const double m_hat = m[i] / bc1;
            const double v_hat = v[i] / bc2;
            p[i] -= cfg_.learning_rate *
                    (m_hat / (std::sqrt(v_hat) + cfg_.epsilon) + cfg_.weight_decay * p[i]);
        }
    }
}

}  // namespace crisp
