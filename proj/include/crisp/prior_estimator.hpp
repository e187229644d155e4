#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "crisp/dataset.hpp"
#include "crisp/matrix.hpp"

namespace crisp {

struct EstimatorConfig {
    double delta = 0.01;
    double tau = 0.01;

    void validate() const;
};

// Per-label prior estimates with the chosen thresholds and the minimized
// confidence-bound objective, plus the sample counts behind them.
struct PriorEstimate {
    std::vector<double> priors;       // clamped to [1/n, 1]
    std::vector<double> thresholds;   // member of the label's score set
    std::vector<double> objectives;   // minimized UCB value
    std::vector<std::size_t> labeled_counts;
    // 0/1 flags, one per label, set when the value was carried over from a
    // previous estimate. Not vector<bool>: labels are written in parallel.
    std::vector<std::uint8_t> reused;
    std::size_t total_count = 0;
};

// Fraction of scores >= z (inclusive).
double tail_fraction(std::span<const double> scores, double z);

// Same, restricted to the observed-positive subset.
double tail_fraction(std::span<const double> scores, std::span<const std::size_t> labeled_idx,
                     double z);

// Ratio of the two tail fractions plus the confidence penalty
//   (1+tau)/qp * (sqrt(log(4/delta)/2n) + sqrt(log(4/delta)/2n_p)).
// Throws DataError when no labeled score reaches z (ratio undefined).
double ucb_objective(std::span<const double> scores, std::span<const std::size_t> labeled_idx,
                     double z, const EstimatorConfig& cfg);

struct SingleLabelPrior {
    double prior = 0.0;
    double threshold = 0.0;
    double objective = 0.0;
};

// Exhaustive search over the observed score values: keep candidates with a
// nonzero labeled tail, minimize the UCB objective (ties -> smallest z), and
// clamp the resulting ratio into [1/n, 1].
SingleLabelPrior estimate_prior(std::span<const double> scores,
                                std::span<const std::size_t> labeled_idx,
                                const EstimatorConfig& cfg);

// Runs estimate_prior on every label column. A label whose observed-positive
// set is empty reuses the entry from `previous`; without a previous estimate
// that label is an error.
PriorEstimate estimate_all_priors(const Matrix& probs, const SinglePositiveDataset& sp,
                                  const EstimatorConfig& cfg,
                                  const PriorEstimate* previous = nullptr);

}  // namespace crisp
