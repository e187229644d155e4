#include "crisp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "crisp/errors.hpp"

namespace crisp {

namespace {

constexpr std::size_t kParallelMinInstances = 256;

void check_shapes(const Matrix& probs, const Matrix& labels) {
    if (!probs.same_shape(labels)) throw std::invalid_argument("metrics: shape mismatch");
    if (probs.rows() == 0 || probs.cols() == 0)
        throw std::invalid_argument("metrics: empty input");
}

// Per-instance values; NaN marks an excluded instance. Reduction over the
// slots is serial, so parallel filling stays deterministic.
double mean_of_defined(const std::vector<double>& slots, std::size_t& excluded,
                       const char* what) {
    double sum = 0.0;
    std::size_t defined = 0;
    for (double v : slots) {
        if (std::isnan(v)) continue;
        sum += v;
        ++defined;
    }
    excluded = slots.size() - defined;
    if (defined == 0) throw DataError(std::string(what) + ": undefined on every instance");
    return sum / double(defined);
}

double ranking_loss_row(const double* scores, const double* labels, std::size_t c) {
    std::size_t relevant = 0;
    for (std::size_t j = 0; j < c; ++j)
        if (labels[j] != 0.0) ++relevant;
    const std::size_t irrelevant = c - relevant;
    if (relevant == 0 || irrelevant == 0) return std::nan("");

    std::vector<std::size_t> order(c);
    for (std::size_t j = 0; j < c; ++j) order[j] = j;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    // Walk descending tie groups; a relevant label is beaten by every
    // irrelevant one strictly above it and half-beaten by ties.
    double miss = 0.0;
    std::size_t irr_above = 0;
    std::size_t g = 0;
    while (g < c) {
        std::size_t end = g;
        std::size_t rel_g = 0, irr_g = 0;
        while (end < c && scores[order[end]] == scores[order[g]]) {
            if (labels[order[end]] != 0.0)
                ++rel_g;
            else
                ++irr_g;
            ++end;
        }
        miss += double(rel_g) * (double(irr_above) + 0.5 * double(irr_g));
        irr_above += irr_g;
        g = end;
    }
    return miss / (double(relevant) * double(irrelevant));
}

double one_error_row(const double* scores, const double* labels, std::size_t c) {
    bool any_relevant = false;
    for (std::size_t j = 0; j < c; ++j)
        if (labels[j] != 0.0) any_relevant = true;
    if (!any_relevant) return std::nan("");
    std::size_t top = 0;
    for (std::size_t j = 1; j < c; ++j)
        if (scores[j] > scores[top]) top = j;
    return labels[top] != 0.0 ? 0.0 : 1.0;
}

double coverage_row(const double* scores, const double* labels, std::size_t c) {
    double min_rel_score = 0.0;
    bool any_relevant = false;
    for (std::size_t j = 0; j < c; ++j) {
        if (labels[j] == 0.0) continue;
        if (!any_relevant || scores[j] < min_rel_score) min_rel_score = scores[j];
        any_relevant = true;
    }
    if (!any_relevant) return std::nan("");
    // Worst rank over relevant labels = rank of the lowest-scored one.
    std::size_t rank = 0;
    for (std::size_t j = 0; j < c; ++j)
        if (scores[j] >= min_rel_score) ++rank;
    return double(rank - 1) / double(c);
}

// Average precision of `positives` under `scores`, shared by the
// example-based and the per-label (column) variants. Sorted tie-group walk:
// every member of a tie group takes the group's worst rank.
double ap_of_ranking(const std::vector<double>& scores, const std::vector<bool>& positives) {
    std::size_t num_pos = 0;
    for (bool p : positives)
        if (p) ++num_pos;
    if (num_pos == 0) return std::nan("");

    const std::size_t m = scores.size();
    std::vector<std::size_t> order(m);
    for (std::size_t k = 0; k < m; ++k) order[k] = k;
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

    double sum = 0.0;
    std::size_t pos_cum = 0;
    std::size_t g = 0;
    while (g < m) {
        std::size_t end = g;
        std::size_t pos_g = 0;
        while (end < m && scores[order[end]] == scores[order[g]]) {
            if (positives[order[end]]) ++pos_g;
            ++end;
        }
        pos_cum += pos_g;
        sum += double(pos_g) * double(pos_cum) / double(end);
        g = end;
    }
    return sum / double(num_pos);
}

double avg_precision_row(const double* scores, const double* labels, std::size_t c) {
    std::vector<double> s(scores, scores + c);
    std::vector<bool> pos(c);
    for (std::size_t j = 0; j < c; ++j) pos[j] = labels[j] != 0.0;
    return ap_of_ranking(s, pos);
}

}  // namespace

double hamming_loss(const Matrix& probs, const Matrix& labels, double threshold) {
    check_shapes(probs, labels);
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < probs.rows(); ++i)
        for (std::size_t j = 0; j < probs.cols(); ++j) {
            const bool predicted = probs(i, j) >= threshold;
            const bool actual = labels(i, j) != 0.0;
            if (predicted != actual) ++mismatches;
        }
    return double(mismatches) / double(probs.rows() * probs.cols());
}

namespace {

template <typename RowFn>
double per_instance_metric(const Matrix& probs, const Matrix& labels, RowFn row_fn,
                           std::size_t& excluded, const char* what) {
    check_shapes(probs, labels);
    const std::size_t n = probs.rows();
    const std::size_t c = probs.cols();
    std::vector<double> slots(n);
#pragma omp parallel for schedule(static) if (n >= kParallelMinInstances)
    for (std::size_t i = 0; i < n; ++i) slots[i] = row_fn(probs.row(i), labels.row(i), c);
    return mean_of_defined(slots, excluded, what);
}

}  // namespace

double ranking_loss(const Matrix& probs, const Matrix& labels) {
    std::size_t excluded = 0;
    return per_instance_metric(probs, labels, ranking_loss_row, excluded, "ranking_loss");
}

double one_error(const Matrix& probs, const Matrix& labels) {
    std::size_t excluded = 0;
    return per_instance_metric(probs, labels, one_error_row, excluded, "one_error");
}

double coverage(const Matrix& probs, const Matrix& labels) {
    std::size_t excluded = 0;
    return per_instance_metric(probs, labels, coverage_row, excluded, "coverage");
}

double average_precision(const Matrix& probs, const Matrix& labels) {
    std::size_t excluded = 0;
    return per_instance_metric(probs, labels, avg_precision_row, excluded, "average_precision");
}

double mean_average_precision(const Matrix& probs, const Matrix& labels) {
    check_shapes(probs, labels);
    const std::size_t n = probs.rows();
    const std::size_t c = probs.cols();
    std::vector<double> slots(c);
#pragma omp parallel for schedule(dynamic) if (c >= 8)
    for (std::size_t j = 0; j < c; ++j) {
        std::vector<double> column(n);
        std::vector<bool> pos(n);
        for (std::size_t i = 0; i < n; ++i) {
            column[i] = probs(i, j);
            pos[i] = labels(i, j) != 0.0;
        }
        slots[j] = ap_of_ranking(column, pos);
    }
    std::size_t excluded = 0;
    return mean_of_defined(slots, excluded, "mean_average_precision");
}

MetricsReport compute_metrics(const Matrix& probs, const Matrix& labels) {
    check_shapes(probs, labels);
    MetricsReport report;
    report.n = probs.rows();
    report.c = probs.cols();
    report.hamming_loss = hamming_loss(probs, labels);
    report.ranking_loss =
        per_instance_metric(probs, labels, ranking_loss_row, report.ranking_excluded,
                            "ranking_loss");
    report.one_error =
        per_instance_metric(probs, labels, one_error_row, report.one_error_excluded,
                            "one_error");
    report.coverage =
        per_instance_metric(probs, labels, coverage_row, report.coverage_excluded, "coverage");
    report.average_precision =
        per_instance_metric(probs, labels, avg_precision_row, report.avg_prec_excluded,
                            "average_precision");

    const std::size_t n = report.n;
    const std::size_t c = report.c;
    std::vector<double> slots(c);
#pragma omp parallel for schedule(dynamic) if (c >= 8)
    for (std::size_t j = 0; j < c; ++j) {
        std::vector<double> column(n);
        std::vector<bool> pos(n);
        for (std::size_t i = 0; i < n; ++i) {
            column[i] = probs(i, j);
            pos[i] = labels(i, j) != 0.0;
        }
        slots[j] = ap_of_ranking(column, pos);
    }
    report.mean_average_precision =
        mean_of_defined(slots, report.map_labels_excluded, "mean_average_precision");
    return report;
}

}  // namespace crisp
