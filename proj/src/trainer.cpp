#include "crisp/trainer.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>
#include <string>

#include "crisp/errors.hpp"
#include "crisp/optimizer.hpp"
#include "crisp/risk.hpp"
#include "crisp/rng.hpp"

namespace crisp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

Matrix gather_rows(const Matrix& src, const std::vector<std::size_t>& order, std::size_t begin,
                   std::size_t end) {
    Matrix out(end - begin, src.cols());
    for (std::size_t r = begin; r < end; ++r)
        for (std::size_t j = 0; j < src.cols(); ++j) out(r - begin, j) = src(order[r], j);
    return out;
}

// Positive sets re-indexed to batch-local rows.
PositiveSets batch_positive_sets(const SinglePositiveDataset& sp,
                                 const std::vector<std::size_t>& order, std::size_t begin,
                                 std::size_t end) {
    PositiveSets sets(sp.c());
    for (std::size_t r = begin; r < end; ++r)
        sets[sp.observed[order[r]]].push_back(r - begin);
    return sets;
}

// One pass of mini-batch optimization; returns the mean per-batch loss.
double run_epoch(Classifier& model, AdamOptimizer& adam, const SinglePositiveDataset& sp,
                 const TrainConfig& cfg, const RiskConfig* risk_cfg, LossKind kind, Rng& rng) {
    const std::size_t n = sp.n();
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    rng.shuffle(order);

    double loss_sum = 0.0;
    std::size_t batches = 0;
    for (std::size_t begin = 0; begin < n; begin += cfg.batch_size) {
        const std::size_t end = std::min(begin + cfg.batch_size, n);
        const Matrix X = gather_rows(sp.features, order, begin, end);
        const PositiveSets sets = batch_positive_sets(sp, order, begin, end);
        const Matrix logits = forward_logits(model, X);

        double batch_loss = 0.0;
        if (kind == LossKind::an) {
            Matrix probs = logits;
            for (double& v : probs.values()) v = stable_sigmoid(v);
            Matrix one_hot(X.rows(), sp.c());
            for (std::size_t j = 0; j < sets.size(); ++j)
                for (std::size_t i : sets[j]) one_hot(i, j) = 1.0;
            batch_loss = an_warmup_loss(probs, one_hot);
        } else {
            batch_loss = crisp_biased_risk(logits, sets, *risk_cfg).total;
        }
        loss_sum += batch_loss;
        ++batches;

        RiskConfig empty_cfg;
        const Matrix grad =
            risk_gradients(logits, sets, risk_cfg ? *risk_cfg : empty_cfg, kind);
        const GradientSet grads = backward(model, X, grad);
        adam.step(model.parameter_spans(), grads.parameter_spans());
    }
    return batches > 0 ? loss_sum / double(batches) : 0.0;
}

void check_labels_covered(const SinglePositiveDataset& sp) {
    std::vector<std::size_t> counts(sp.c(), 0);
    for (std::size_t g : sp.observed) ++counts[g];
    for (std::size_t j = 0; j < counts.size(); ++j)
        if (counts[j] == 0)
            throw DataError("label " + std::to_string(j) +
                            " has no observed positives; supply fixed priors or more data");
}

}  // namespace

void TrainConfig::validate() const {
    if (batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (prior_refresh_every < 1) throw std::invalid_argument("prior_refresh_every must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning_rate must be > 0");
    if (!(weight_decay >= 0.0)) throw std::invalid_argument("weight_decay must be >= 0");
    if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
    estimator.validate();
    if (fixed_priors)
        for (double p : *fixed_priors)
            if (!(p > 0.0 && p <= 1.0))
                throw std::invalid_argument("fixed priors must lie in (0,1]");
}

Classifier warmup(Classifier model, const SinglePositiveDataset& sp, const TrainConfig& cfg) {
    cfg.validate();
    if (sp.q() != model.input_dim() || sp.c() != model.output_dim())
        throw std::invalid_argument("warmup: model dims do not match dataset");
    AdamOptimizer adam({cfg.learning_rate, 0.9, 0.999, 1e-8, cfg.weight_decay},
                       model.parameter_spans());
    Rng rng(cfg.seed);
    for (std::size_t e = 0; e < cfg.warmup_epochs; ++e)
        run_epoch(model, adam, sp, cfg, nullptr, LossKind::an, rng);
    return model;
}

std::pair<Classifier, TrainReport> train(Classifier model, const SinglePositiveDataset& sp,
                                         const TrainConfig& cfg, const MultiLabelDataset* val,
                                         const std::vector<double>* true_priors) {
    cfg.validate();
    if (sp.q() != model.input_dim() || sp.c() != model.output_dim())
        throw std::invalid_argument("train: model dims do not match dataset");
    if (cfg.fixed_priors && cfg.fixed_priors->size() != sp.c())
        throw std::invalid_argument("train: fixed prior arity != label count");
    if (true_priors && true_priors->size() != sp.c())
        throw std::invalid_argument("train: true prior arity != label count");
    if (!cfg.fixed_priors) check_labels_covered(sp);

    TrainReport report;
    if (true_priors) report.true_priors = *true_priors;

    AdamOptimizer adam({cfg.learning_rate, 0.9, 0.999, 1e-8, cfg.weight_decay},
                       model.parameter_spans());
    Rng rng(cfg.seed);
    for (std::size_t e = 0; e < cfg.warmup_epochs; ++e)
        run_epoch(model, adam, sp, cfg, nullptr, LossKind::an, rng);

    RiskConfig risk_cfg;
    risk_cfg.lambda = cfg.lambda;
    if (cfg.fixed_priors) risk_cfg.priors = *cfg.fixed_priors;

    PriorEstimate estimate;
    bool have_estimate = false;

    for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
        const auto epoch_start = Clock::now();
        EpochRecord record;

        if (!cfg.fixed_priors && epoch % cfg.prior_refresh_every == 0) {
            const auto prior_start = Clock::now();
            const Matrix probs = forward_probs(model, sp.features);
            estimate = estimate_all_priors(probs, sp, cfg.estimator,
                                           have_estimate ? &estimate : nullptr);
            have_estimate = true;
            risk_cfg.priors = estimate.priors;
            record.prior_seconds = seconds_since(prior_start);
        }
        record.priors = risk_cfg.priors;
        if (true_priors) {
            std::vector<double> err(sp.c());
            for (std::size_t j = 0; j < sp.c(); ++j)
                err[j] = std::fabs(risk_cfg.priors[j] - (*true_priors)[j]);
            record.prior_abs_error = std::move(err);
        }

        record.mean_loss = run_epoch(model, adam, sp, cfg, &risk_cfg, LossKind::biased, rng);
        if (val) record.val_metrics = evaluate(model, *val);
        record.epoch_seconds = seconds_since(epoch_start);
        report.epochs.push_back(std::move(record));
    }
    return {std::move(model), std::move(report)};
}

MetricsReport evaluate(const Classifier& model, const MultiLabelDataset& test) {
    return compute_metrics(forward_probs(model, test.features), test.labels);
}

}  // namespace crisp
