#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "crisp/dataset.hpp"
#include "crisp/metrics.hpp"
#include "crisp/model.hpp"
#include "crisp/prior_estimator.hpp"

namespace crisp {

struct TrainConfig {
    std::size_t epochs = 10;
    std::size_t warmup_epochs = 2;
    std::size_t batch_size = 16;
    double learning_rate = 1e-3;
    double weight_decay = 1e-4;
    std::uint64_t seed = 1;
    EstimatorConfig estimator;
    double lambda = 1.0;
    std::size_t prior_refresh_every = 1;
    // Ablation mode: skip the estimator and train with these priors.
    std::optional<std::vector<double>> fixed_priors;

    void validate() const;
};

struct EpochRecord {
    std::vector<double> priors;
    double mean_loss = 0.0;
    double epoch_seconds = 0.0;
    double prior_seconds = 0.0;  // time spent re-estimating priors
    std::optional<std::vector<double>> prior_abs_error;  // |estimate - truth| per label
    std::optional<MetricsReport> val_metrics;
};

struct TrainReport {
    std::vector<EpochRecord> epochs;
    std::optional<std::vector<double>> true_priors;
    std::string checkpoint_path;  // filled by the CLI after saving
};

// Mini-batch assume-negative warm-up; prior estimation does not run here.
Classifier warmup(Classifier model, const SinglePositiveDataset& sp, const TrainConfig& cfg);

// Full training loop: warm-up, then per epoch (re-)estimate priors on the
// whole training set and minimize the logit-bias risk over seeded shuffled
// mini-batches. Optimizer state carries through from warm-up. With
// fixed_priors set, estimation is skipped entirely. Every label must have an
// observed positive unless fixed_priors is given.
std::pair<Classifier, TrainReport> train(Classifier model, const SinglePositiveDataset& sp,
                                         const TrainConfig& cfg,
                                         const MultiLabelDataset* val = nullptr,
                                         const std::vector<double>* true_priors = nullptr);

MetricsReport evaluate(const Classifier& model, const MultiLabelDataset& test);

}  // namespace crisp
