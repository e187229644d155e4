#pragma once

#include <cstdint>
#include <vector>

#include "crisp/dataset.hpp"

namespace crisp {

// Generator configuration for datasets with exactly known class priors.
struct SynthConfig {
    std::size_t n = 0;
    std::size_t q = 0;
    std::size_t c = 0;
    std::vector<double> target_priors;  // each in (0,1)
    double separability = 1.0;          // margin pushed onto each label direction
    double label_correlation = 0.0;     // in [0,1): shared latent direction mix
    std::uint64_t seed = 0;

    void validate() const;
};

struct SynthResult {
    MultiLabelDataset data;
    std::vector<double> realized_priors;  // round(n * pi) / n, exact by construction
};

// Gaussian features; label j is a quantile-thresholded linear cut along a
// per-label direction, so each realized prior is exact. separability > 0
// pushes instances away from each cut along its direction (directions are
// orthonormalized first, so pushes do not disturb other labels when
// label_correlation is 0).
SynthResult generate(const SynthConfig& cfg);

// Classifier-free score fixture for the prior estimator: round(n * pi)
// positives (stored first) with scores uniform in [pos_low, pos_high],
// negatives uniform in [neg_low, neg_high], and a labeled_frac subset of the
// positives marked observed.
struct ScoreFixture {
    std::vector<double> scores;
    std::vector<std::size_t> labeled;
    std::size_t positive_count = 0;  // positives occupy indices [0, positive_count)
    double true_pi = 0.0;
};

ScoreFixture score_fixture(std::size_t n, double pi, double pos_low, double pos_high,
                           double neg_low, double neg_high, double labeled_frac,
                           std::uint64_t seed);

}  // namespace crisp
