#pragma once

#include <span>
#include <vector>

#include "crisp/matrix.hpp"
#include "crisp/model.hpp"
#include "crisp/prior_estimator.hpp"
#include "crisp/risk.hpp"

// Plain serial implementations, written independently of the kernels in the
// main library: direct loops and full enumeration, no sorting tricks, no
// OpenMP. Tests compare the two paths; the benchmark tool times them.
namespace crisp::ref {

Matrix forward_logits(const Classifier& model, const Matrix& X);
GradientSet backward(const Classifier& model, const Matrix& X, const Matrix& upstream);

SingleLabelPrior estimate_prior(std::span<const double> scores,
                                std::span<const std::size_t> labeled_idx,
                                const EstimatorConfig& cfg);

LossValue crisp_biased_risk(const Matrix& logits, const PositiveSets& positive_sets,
                            const RiskConfig& cfg);

// Brute-force metric twins: pairwise / full-enumeration definitions.
double hamming_loss(const Matrix& probs, const Matrix& labels, double threshold = 0.5);
double ranking_loss(const Matrix& probs, const Matrix& labels);
double one_error(const Matrix& probs, const Matrix& labels);
double coverage(const Matrix& probs, const Matrix& labels);
double average_precision(const Matrix& probs, const Matrix& labels);
double mean_average_precision(const Matrix& probs, const Matrix& labels);

}  // namespace crisp::ref
