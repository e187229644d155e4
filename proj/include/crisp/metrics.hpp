#pragma once

#include <cstddef>

#include "crisp/matrix.hpp"

namespace crisp {

// The six evaluation measures. Rank-based metrics use modified competition
// ranking: tied scores share the worst rank of their tie group, rank 1 is
// the highest score. Instances (or labels, for mAP) on which a metric is
// undefined are excluded and counted.
struct MetricsReport {
    std::size_t n = 0;
    std::size_t c = 0;
    double hamming_loss = 0.0;
    double ranking_loss = 0.0;
    double one_error = 0.0;
    double coverage = 0.0;
    double average_precision = 0.0;        // example-based
    double mean_average_precision = 0.0;   // label-macro
    std::size_t ranking_excluded = 0;      // instances with no (rel, irrel) pair
    std::size_t one_error_excluded = 0;    // instances with no relevant label
    std::size_t coverage_excluded = 0;
    std::size_t avg_prec_excluded = 0;
    std::size_t map_labels_excluded = 0;   // labels with no positive instance
};

double hamming_loss(const Matrix& probs, const Matrix& labels, double threshold = 0.5);

// Per instance, the fraction of (relevant, irrelevant) pairs ranked wrongly;
// ties count 0.5. Throws DataError when no instance has both kinds.
double ranking_loss(const Matrix& probs, const Matrix& labels);

// Fraction of instances whose top-scoring label (smallest index on ties) is
// irrelevant, over instances with at least one relevant label.
double one_error(const Matrix& probs, const Matrix& labels);

// Mean of (rank of the worst-ranked relevant label - 1) / c.
double coverage(const Matrix& probs, const Matrix& labels);

// Example-based average precision over each instance's label ranking.
double average_precision(const Matrix& probs, const Matrix& labels);

// Label-macro mean of per-column average precision over instance rankings.
double mean_average_precision(const Matrix& probs, const Matrix& labels);

MetricsReport compute_metrics(const Matrix& probs, const Matrix& labels);

}  // namespace crisp
