#include "crisp/prior_estimator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "crisp/errors.hpp"

namespace crisp {

namespace {

constexpr std::size_t kParallelMinLabels = 4;

std::size_t count_at_or_above(const std::vector<double>& sorted_asc, double z) {
    const auto it = std::lower_bound(sorted_asc.begin(), sorted_asc.end(), z);
    return static_cast<std::size_t>(sorted_asc.end() - it);
}

double penalty(std::size_t n, std::size_t n_p, const EstimatorConfig& cfg) {
    const double log_term = std::log(4.0 / cfg.delta);
    return std::sqrt(log_term / (2.0 * double(n))) + std::sqrt(log_term / (2.0 * double(n_p)));
}

}  // namespace

void EstimatorConfig::validate() const {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
    if (!(tau > 0.0 && tau < 1.0)) throw std::invalid_argument("tau must lie in (0,1)");
}

double tail_fraction(std::span<const double> scores, double z) {
    if (scores.empty()) throw DataError("tail_fraction: empty score set");
    std::size_t count = 0;
    for (double s : scores)
        if (s >= z) ++count;
    return double(count) / double(scores.size());
}

double tail_fraction(std::span<const double> scores, std::span<const std::size_t> labeled_idx,
                     double z) {
    if (labeled_idx.empty()) throw DataError("no observed positives for label");
    std::size_t count = 0;
    for (std::size_t i : labeled_idx)
        if (scores[i] >= z) ++count;
    return double(count) / double(labeled_idx.size());
}

double ucb_objective(std::span<const double> scores, std::span<const std::size_t> labeled_idx,
                     double z, const EstimatorConfig& cfg) {
    cfg.validate();
    const double q = tail_fraction(scores, z);
    const double qp = tail_fraction(scores, labeled_idx, z);
    if (qp == 0.0) throw DataError("ucb_objective: no labeled score reaches threshold");
    return q / qp + (1.0 + cfg.tau) / qp * penalty(scores.size(), labeled_idx.size(), cfg);
}

SingleLabelPrior estimate_prior(std::span<const double> scores,
                                std::span<const std::size_t> labeled_idx,
                                const EstimatorConfig& cfg) {
    cfg.validate();
    if (scores.empty()) throw DataError("estimate_prior: empty score set");
    if (labeled_idx.empty()) throw DataError("no observed positives for label");

    const std::size_t n = scores.size();
    const std::size_t n_p = labeled_idx.size();

    std::vector<double> sorted_all(scores.begin(), scores.end());
    std::sort(sorted_all.begin(), sorted_all.end());
    std::vector<double> sorted_labeled;
    sorted_labeled.reserve(n_p);
    for (std::size_t i : labeled_idx) sorted_labeled.push_back(scores[i]);
    std::sort(sorted_labeled.begin(), sorted_labeled.end());

    // Candidates are the distinct observed scores; anything above the top
    // labeled score has an empty labeled tail and is excluded.
    const double max_labeled = sorted_labeled.back();
    std::vector<double> candidates(sorted_all.begin(),
                                   std::upper_bound(sorted_all.begin(), sorted_all.end(),
                                                    max_labeled));
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    const double pen = penalty(n, n_p, cfg);
    std::vector<double> objective(candidates.size());
    std::vector<double> ratio(candidates.size());
#pragma omp parallel for schedule(static) if (candidates.size() >= 1024)
    for (std::size_t k = 0; k < candidates.size(); ++k) {
        const double z = candidates[k];
        const double q = double(count_at_or_above(sorted_all, z)) / double(n);
        const double qp = double(count_at_or_above(sorted_labeled, z)) / double(n_p);
        ratio[k] = q / qp;
        objective[k] = ratio[k] + (1.0 + cfg.tau) / qp * pen;
    }

    // Ascending scan, strict improvement: ties resolve to the smallest z.
    std::size_t best = 0;
    for (std::size_t k = 1; k < candidates.size(); ++k)
        if (objective[k] < objective[best]) best = k;

    SingleLabelPrior out;
    out.threshold = candidates[best];
    out.objective = objective[best];
    out.prior = std::clamp(ratio[best], 1.0 / double(n), 1.0);
    return out;
}

PriorEstimate estimate_all_priors(const Matrix& probs, const SinglePositiveDataset& sp,
                                  const EstimatorConfig& cfg, const PriorEstimate* previous) {
    cfg.validate();
    if (probs.rows() != sp.n() || probs.cols() != sp.c())
        throw std::invalid_argument("estimate_all_priors: probs not aligned with dataset");
    if (previous && previous->priors.size() != sp.c())
        throw std::invalid_argument("estimate_all_priors: previous estimate has wrong arity");

    const std::size_t n = sp.n();
    const std::size_t c = sp.c();
    PriorEstimate est;
    est.priors.assign(c, 0.0);
    est.thresholds.assign(c, 0.0);
    est.objectives.assign(c, 0.0);
    est.labeled_counts.assign(c, 0);
    est.reused.assign(c, 0);
    est.total_count = n;

    std::vector<std::vector<std::size_t>> positive_sets(c);
    for (std::size_t i = 0; i < n; ++i) positive_sets[sp.observed[i]].push_back(i);

    for (std::size_t j = 0; j < c; ++j) {
        if (positive_sets[j].empty() && !previous)
            throw DataError("label " + std::to_string(j) +
                            " has no observed positives and no previous estimate");
    }

#pragma omp parallel for schedule(dynamic) if (c >= kParallelMinLabels)
    for (std::size_t j = 0; j < c; ++j) {
        if (positive_sets[j].empty()) {
            est.priors[j] = previous->priors[j];
            est.thresholds[j] = previous->thresholds[j];
            est.objectives[j] = previous->objectives[j];
            est.labeled_counts[j] = 0;
            est.reused[j] = 1;
            continue;
        }
        std::vector<double> column(n);
        for (std::size_t i = 0; i < n; ++i) column[i] = probs(i, j);
        const auto single = estimate_prior(column, positive_sets[j], cfg);
        est.priors[j] = single.prior;
        est.thresholds[j] = single.threshold;
        est.objectives[j] = single.objective;
        est.labeled_counts[j] = positive_sets[j].size();
    }
    return est;
}

}  // namespace crisp
