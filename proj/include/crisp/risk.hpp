#pragma once

#include <vector>

#include "crisp/matrix.hpp"

namespace crisp {

struct RiskConfig {
    std::vector<double> priors;  // one per label, each in (0, 1]
    double lambda = 1.0;         // logit-bias strength, >= 0

    void validate(std::size_t c) const;
};

// Decomposition of the weak-supervision risk: per label, a positive-sample
// term and a nonnegative prior-alignment term.
struct LossValue {
    double total = 0.0;
    std::vector<double> positive_term;
    std::vector<double> alignment_term;
};

using PositiveSets = std::vector<std::vector<std::size_t>>;

// Mean absolute loss under full supervision:
//   (1/n) sum_i sum_j [ y_ij (1 - f_ij) + (1 - y_ij) f_ij ].
double full_supervised_risk(const Matrix& probs, const Matrix& labels);

// The same risk rewritten through empirical class priors and the
// positive-conditional mean:
//   sum_j 2 p_j E[1-f_j | y_j=1] + (E[f_j] - p_j).
// Algebraically identical to full_supervised_risk; every label needs at
// least one positive instance.
double decomposed_risk(const Matrix& probs, const Matrix& labels);

// Weak-supervision risk from probabilities:
//   sum_j (2 pi_j / |S_j|) sum_{i in S_j} (1 - f_ij) + |mean_i f_ij - pi_j|.
// Labels with an empty positive set in the batch contribute only the
// alignment term. lambda is ignored here.
LossValue crisp_empirical_risk(const Matrix& probs, const PositiveSets& positive_sets,
                               const RiskConfig& cfg);

// Logit-bias variant: the positive term scores sigmoid(g - lambda * (1 - pi_j))
// while the alignment term keeps the unbiased probabilities.
LossValue crisp_biased_risk(const Matrix& logits, const PositiveSets& positive_sets,
                            const RiskConfig& cfg);

// Assume-negative warm-up: mean binary cross entropy against the observed
// one-hot labels, with probabilities clamped at 1e-12 for the logs.
double an_warmup_loss(const Matrix& probs, const Matrix& observed_one_hot);

enum class LossKind { an, unbiased, biased };

// dLoss/dlogits for the selected loss. The alignment term's absolute value
// uses subgradient 0 at exactly zero deviation.
Matrix risk_gradients(const Matrix& logits, const PositiveSets& positive_sets,
                      const RiskConfig& cfg, LossKind kind);

}  // namespace crisp
