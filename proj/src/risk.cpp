#include "crisp/risk.hpp"

#include <cmath>
#include <stdexcept>

#include "crisp/errors.hpp"
#include "crisp/model.hpp"

namespace crisp {

namespace {

constexpr double kLogClamp = 1e-12;
constexpr std::size_t kParallelMinLabels = 4;

double sign_or_zero(double x) {
    if (x > 0.0) return 1.0;
    if (x < 0.0) return -1.0;
    return 0.0;
}

void check_probs_shape(const Matrix& a, const Matrix& b, const char* what) {
    if (!a.same_shape(b)) throw std::invalid_argument(std::string("shape mismatch: ") + what);
    if (a.rows() == 0) throw std::invalid_argument(std::string("empty batch: ") + what);
}

void check_positive_sets(const PositiveSets& sets, std::size_t n, std::size_t c) {
    if (sets.size() != c) throw std::invalid_argument("positive sets arity != label count");
    for (const auto& s : sets)
        for (std::size_t i : s)
            if (i >= n) throw std::invalid_argument("positive set index out of batch range");
}

}  // namespace

void RiskConfig::validate(std::size_t c) const {
    if (priors.size() != c) throw std::invalid_argument("prior vector arity != label count");
    for (double p : priors)
        if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("priors must lie in (0,1]");
    if (!(lambda >= 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("lambda must be finite and >= 0");
}

double full_supervised_risk(const Matrix& probs, const Matrix& labels) {
    check_probs_shape(probs, labels, "full_supervised_risk");
    const std::size_t n = probs.rows();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < probs.cols(); ++j) {
            const double f = probs(i, j);
            total += labels(i, j) != 0.0 ? 1.0 - f : f;
        }
    return total / double(n);
}

double decomposed_risk(const Matrix& probs, const Matrix& labels) {
    check_probs_shape(probs, labels, "decomposed_risk");
    const std::size_t n = probs.rows();
    const std::size_t c = probs.cols();
    double total = 0.0;
    for (std::size_t j = 0; j < c; ++j) {
        std::size_t positives = 0;
        double pos_complement_sum = 0.0;  // sum of (1 - f) over positives
        double mean_prob = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            mean_prob += probs(i, j);
            if (labels(i, j) != 0.0) {
                ++positives;
                pos_complement_sum += 1.0 - probs(i, j);
            }
        }
        if (positives == 0)
            throw DataError("decomposed_risk: label " + std::to_string(j) + " has no positives");
        mean_prob /= double(n);
        const double prior = double(positives) / double(n);
        total += 2.0 * prior * (pos_complement_sum / double(positives)) + (mean_prob - prior);
    }
    return total;
}

namespace {

// Shared core of the unbiased and logit-bias risks. `biased` selects whether
// the positive term shifts logits by lambda * (1 - pi_j); the alignment term
// always uses the unshifted probabilities.
LossValue crisp_risk_impl(const Matrix& logits_or_probs, const PositiveSets& positive_sets,
                          const RiskConfig& cfg, bool from_logits, bool biased) {
    const std::size_t n = logits_or_probs.rows();
    const std::size_t c = logits_or_probs.cols();
    cfg.validate(c);
    check_positive_sets(positive_sets, n, c);
    if (n == 0) throw std::invalid_argument("empty batch");

    LossValue loss;
    loss.positive_term.assign(c, 0.0);
    loss.alignment_term.assign(c, 0.0);

#pragma omp parallel for schedule(static) if (c >= kParallelMinLabels)
    for (std::size_t j = 0; j < c; ++j) {
        const double pi = cfg.priors[j];
        const double shift = biased ? cfg.lambda * (1.0 - pi) : 0.0;

        double mean_prob = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double v = logits_or_probs(i, j);
            mean_prob += from_logits ? stable_sigmoid(v) : v;
        }
        mean_prob /= double(n);
        loss.alignment_term[j] = std::fabs(mean_prob - pi);

        const auto& pos = positive_sets[j];
        if (!pos.empty()) {
            double complement_sum = 0.0;
            for (std::size_t i : pos) {
                const double v = logits_or_probs(i, j);
                const double f = from_logits ? stable_sigmoid(v - shift) : v;
                complement_sum += 1.0 - f;
            }
            loss.positive_term[j] = 2.0 * pi / double(pos.size()) * complement_sum;
        }
    }
    for (std::size_t j = 0; j < c; ++j)
        loss.total += loss.positive_term[j] + loss.alignment_term[j];
    return loss;
}

}  // namespace

LossValue crisp_empirical_risk(const Matrix& probs, const PositiveSets& positive_sets,
                               const RiskConfig& cfg) {
    return crisp_risk_impl(probs, positive_sets, cfg, /*from_logits=*/false, /*biased=*/false);
}

LossValue crisp_biased_risk(const Matrix& logits, const PositiveSets& positive_sets,
                            const RiskConfig& cfg) {
    return crisp_risk_impl(logits, positive_sets, cfg, /*from_logits=*/true, /*biased=*/true);
}

double an_warmup_loss(const Matrix& probs, const Matrix& observed_one_hot) {
    check_probs_shape(probs, observed_one_hot, "an_warmup_loss");
    const std::size_t n = probs.rows();
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < probs.cols(); ++j) {
            const double f = probs(i, j);
            if (observed_one_hot(i, j) != 0.0)
                total -= std::log(std::max(f, kLogClamp));
            else
                total -= std::log(std::max(1.0 - f, kLogClamp));
        }
    return total / double(n);
}

Matrix risk_gradients(const Matrix& logits, const PositiveSets& positive_sets,
                      const RiskConfig& cfg, LossKind kind) {
    const std::size_t n = logits.rows();
    const std::size_t c = logits.cols();
    check_positive_sets(positive_sets, n, c);
    if (n == 0) throw std::invalid_argument("empty batch");

    Matrix grad(n, c);

    if (kind == LossKind::an) {
        // BCE with logits: d/dg = (sigmoid(g) - l) / n.
#pragma omp parallel for schedule(static) if (n * c >= 4096)
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < c; ++j)
                grad(i, j) = stable_sigmoid(logits(i, j)) / double(n);
        for (std::size_t j = 0; j < c; ++j)
            for (std::size_t i : positive_sets[j]) grad(i, j) -= 1.0 / double(n);
        return grad;
    }

    cfg.validate(c);
    const bool biased = kind == LossKind::biased;
#pragma omp parallel for schedule(static) if (c >= kParallelMinLabels)
    for (std::size_t j = 0; j < c; ++j) {
        const double pi = cfg.priors[j];
        const double shift = biased ? cfg.lambda * (1.0 - pi) : 0.0;

        double mean_prob = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean_prob += stable_sigmoid(logits(i, j));
        mean_prob /= double(n);
        const double align_sign = sign_or_zero(mean_prob - pi);

        for (std::size_t i = 0; i < n; ++i) {
            const double f = stable_sigmoid(logits(i, j));
            grad(i, j) = align_sign * f * (1.0 - f) / double(n);
        }
        const auto& pos = positive_sets[j];
        if (!pos.empty()) {
            const double weight = 2.0 * pi / double(pos.size());
            for (std::size_t i : pos) {
                const double fb = stable_sigmoid(logits(i, j) - shift);
                grad(i, j) -= weight * fb * (1.0 - fb);
            }
        }
    }
    return grad;
}

}  // namespace crisp
