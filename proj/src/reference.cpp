#include "crisp/reference.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "crisp/errors.hpp"

namespace crisp::ref {

namespace {

// rank(j) = #{k : s_k > s_j} + #{k : s_k == s_j}, i.e. the worst rank of the
// tie group, counted directly.
std::size_t worst_rank(const double* scores, std::size_t m, std::size_t j) {
    std::size_t rank = 0;
    for (std::size_t k = 0; k < m; ++k)
        if (scores[k] >= scores[j]) ++rank;
    return rank;
}

}  // namespace

Matrix forward_logits(const Classifier& model, const Matrix& X) {
    Matrix cur = X;
    for (std::size_t li = 0; li < model.layers.size(); ++li) {
        const Layer& layer = model.layers[li];
        Matrix next(cur.rows(), layer.weights.rows());
        for (std::size_t r = 0; r < cur.rows(); ++r)
            for (std::size_t o = 0; o < layer.weights.rows(); ++o) {
                double acc = layer.bias[o];
                for (std::size_t i = 0; i < layer.weights.cols(); ++i)
                    acc += layer.weights(o, i) * cur(r, i);
                next(r, o) = acc;
            }
        const bool hidden = li + 1 < model.layers.size();
        if (hidden)
            for (double& v : next.values()) v = std::max(v, 0.0);
        cur = std::move(next);
    }
    return cur;
}

GradientSet backward(const Classifier& model, const Matrix& X, const Matrix& upstream) {
    GradientSet grads = zero_gradients(model);
    const std::size_t n = X.rows();

    if (!model.has_hidden()) {
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t o = 0; o < model.output_dim(); ++o) {
                for (std::size_t i = 0; i < model.input_dim(); ++i)
                    grads.layers[0].weights(o, i) += upstream(r, o) * X(r, i);
                grads.layers[0].bias[o] += upstream(r, o);
            }
        return grads;
    }

    const std::size_t h = model.layer_dims[1];
    for (std::size_t r = 0; r < n; ++r) {
        std::vector<double> pre(h, 0.0), act(h, 0.0);
        for (std::size_t k = 0; k < h; ++k) {
            double acc = model.layers[0].bias[k];
            for (std::size_t i = 0; i < model.input_dim(); ++i)
                acc += model.layers[0].weights(k, i) * X(r, i);
            pre[k] = acc;
            act[k] = std::max(acc, 0.0);
        }
        for (std::size_t o = 0; o < model.output_dim(); ++o) {
            for (std::size_t k = 0; k < h; ++k)
                grads.layers[1].weights(o, k) += upstream(r, o) * act[k];
            grads.layers[1].bias[o] += upstream(r, o);
        }
        for (std::size_t k = 0; k < h; ++k) {
            if (pre[k] <= 0.0) continue;
            double delta = 0.0;
            for (std::size_t o = 0; o < model.output_dim(); ++o)
                delta += upstream(r, o) * model.layers[1].weights(o, k);
            for (std::size_t i = 0; i < model.input_dim(); ++i)
                grads.layers[0].weights(k, i) += delta * X(r, i);
            grads.layers[0].bias[k] += delta;
        }
    }
    return grads;
}

SingleLabelPrior estimate_prior(std::span<const double> scores,
                                std::span<const std::size_t> labeled_idx,
                                const EstimatorConfig& cfg) {
    if (labeled_idx.empty()) throw DataError("no observed positives for label");
    SingleLabelPrior best;
    bool found = false;
    // Every observed score is a candidate; recount both tails from scratch.
    for (double z : scores) {
        std::size_t above = 0, labeled_above = 0;
        for (double s : scores)
            if (s >= z) ++above;
        for (std::size_t i : labeled_idx)
            if (scores[i] >= z) ++labeled_above;
        if (labeled_above == 0) continue;
        const double q = double(above) / double(scores.size());
        const double qp = double(labeled_above) / double(labeled_idx.size());
        const double log_term = std::log(4.0 / cfg.delta);
        const double obj = q / qp + (1.0 + cfg.tau) / qp *
                                        (std::sqrt(log_term / (2.0 * double(scores.size()))) +
                                         std::sqrt(log_term / (2.0 * double(labeled_idx.size()))));
        if (!found || obj < best.objective || (obj == best.objective && z < best.threshold)) {
            best.objective = obj;
            best.threshold = z;
            best.prior = std::clamp(q / qp, 1.0 / double(scores.size()), 1.0);
            found = true;
        }
    }
    if (!found) throw DataError("estimate_prior: no feasible threshold");
    return best;
}

LossValue crisp_biased_risk(const Matrix& logits, const PositiveSets& positive_sets,
                            const RiskConfig& cfg) {
    const std::size_t n = logits.rows();
    const std::size_t c = logits.cols();
    cfg.validate(c);
    LossValue loss;
    loss.positive_term.assign(c, 0.0);
    loss.alignment_term.assign(c, 0.0);
    for (std::size_t j = 0; j < c; ++j) {
        const double pi = cfg.priors[j];
        double mean_prob = 0.0;
        for (std::size_t i = 0; i < n; ++i) mean_prob += stable_sigmoid(logits(i, j));
        loss.alignment_term[j] = std::fabs(mean_prob / double(n) - pi);
        if (!positive_sets[j].empty()) {
            double sum = 0.0;
            for (std::size_t i : positive_sets[j])
                sum += 1.0 - stable_sigmoid(logits(i, j) - cfg.lambda * (1.0 - pi));
            loss.positive_term[j] = 2.0 * pi / double(positive_sets[j].size()) * sum;
        }
        loss.total += loss.positive_term[j] + loss.alignment_term[j];
    }
    return loss;
}

double hamming_loss(const Matrix& probs, const Matrix& labels, double threshold) {
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < probs.rows(); ++i)
        for (std::size_t j = 0; j < probs.cols(); ++j)
            if ((probs(i, j) >= threshold) != (labels(i, j) != 0.0)) ++wrong;
    return double(wrong) / double(probs.rows() * probs.cols());
}

double ranking_loss(const Matrix& probs, const Matrix& labels) {
    double sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        double miss = 0.0;
        std::size_t pairs = 0;
        for (std::size_t a = 0; a < probs.cols(); ++a) {
            if (labels(i, a) == 0.0) continue;
            for (std::size_t b = 0; b < probs.cols(); ++b) {
                if (labels(i, b) != 0.0) continue;
                ++pairs;
                if (probs(i, a) < probs(i, b))
                    miss += 1.0;
                else if (probs(i, a) == probs(i, b))
                    miss += 0.5;
            }
        }
        if (pairs == 0) continue;
        sum += miss / double(pairs);
        ++counted;
    }
    if (counted == 0) throw DataError("ranking_loss: undefined on every instance");
    return sum / double(counted);
}

double one_error(const Matrix& probs, const Matrix& labels) {
    double errors = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        bool any = false;
        for (std::size_t j = 0; j < probs.cols(); ++j)
            if (labels(i, j) != 0.0) any = true;
        if (!any) continue;
        std::size_t top = 0;
        for (std::size_t j = 1; j < probs.cols(); ++j)
            if (probs(i, j) > probs(i, top)) top = j;
        if (labels(i, top) == 0.0) errors += 1.0;
        ++counted;
    }
    if (counted == 0) throw DataError("one_error: undefined on every instance");
    return errors / double(counted);
}

double coverage(const Matrix& probs, const Matrix& labels) {
    double sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        std::size_t worst = 0;
        bool any = false;
        for (std::size_t j = 0; j < probs.cols(); ++j) {
            if (labels(i, j) == 0.0) continue;
            any = true;
            worst = std::max(worst, worst_rank(probs.row(i), probs.cols(), j));
        }
        if (!any) continue;
        sum += double(worst - 1) / double(probs.cols());
        ++counted;
    }
    if (counted == 0) throw DataError("coverage: undefined on every instance");
    return sum / double(counted);
}

double average_precision(const Matrix& probs, const Matrix& labels) {
    double sum = 0.0;
    std::size_t counted = 0;
    for (std::size_t i = 0; i < probs.rows(); ++i) {
        double inst = 0.0;
        std::size_t relevant = 0;
        for (std::size_t j = 0; j < probs.cols(); ++j) {
            if (labels(i, j) == 0.0) continue;
            ++relevant;
            const std::size_t rank = worst_rank(probs.row(i), probs.cols(), j);
            std::size_t rel_within = 0;
            for (std::size_t k = 0; k < probs.cols(); ++k)
                if (labels(i, k) != 0.0 && worst_rank(probs.row(i), probs.cols(), k) <= rank)
                    ++rel_within;
            inst += double(rel_within) / double(rank);
        }
        if (relevant == 0) continue;
        sum += inst / double(relevant);
        ++counted;
    }
    if (counted == 0) throw DataError("average_precision: undefined on every instance");
    return sum / double(counted);
}

double mean_average_precision(const Matrix& probs, const Matrix& labels) {
    const std::size_t n = probs.rows();
    double sum = 0.0;
    std::size_t counted = 0;
    std::vector<double> column(n);
    for (std::size_t j = 0; j < probs.cols(); ++j) {
        for (std::size_t i = 0; i < n; ++i) column[i] = probs(i, j);
        double label_ap = 0.0;
        std::size_t positives = 0;
        for (std::size_t i = 0; i < n; ++i) {
            if (labels(i, j) == 0.0) continue;
            ++positives;
            const std::size_t rank = worst_rank(column.data(), n, i);
            std::size_t pos_within = 0;
            for (std::size_t k = 0; k < n; ++k)
                if (labels(k, j) != 0.0 && worst_rank(column.data(), n, k) <= rank)
                    ++pos_within;
            label_ap += double(pos_within) / double(rank);
        }
        if (positives == 0) continue;
        sum += label_ap / double(positives);
        ++counted;
    }
    if (counted == 0) throw DataError("mean_average_precision: undefined on every label");
    return sum / double(counted);
}

}  // namespace crisp::ref
