#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "crisp/errors.hpp"
#include "crisp/prior_estimator.hpp"
#include "crisp/synth.hpp"

using namespace crisp;

namespace {

const std::vector<double> kScores{0.9, 0.8, 0.7, 0.4, 0.3, 0.1};
const std::vector<std::size_t> kLabeled{0, 2};
const EstimatorConfig kWorkedCfg{0.5, 0.01};

// Independent scalar evaluation of the UCB objective.
double oracle_objective(const std::vector<double>& scores,
                        const std::vector<std::size_t>& labeled, double z,
                        const EstimatorConfig& cfg) {
    double q = 0.0, qp = 0.0;
    for (double s : scores) q += s >= z ? 1.0 : 0.0;
    for (std::size_t i : labeled) qp += scores[i] >= z ? 1.0 : 0.0;
    q /= double(scores.size());
    qp /= double(labeled.size());
    const double lg = std::log(4.0 / cfg.delta);
    return q / qp + (1.0 + cfg.tau) / qp *
                        (std::sqrt(lg / (2.0 * double(scores.size()))) +
                         std::sqrt(lg / (2.0 * double(labeled.size()))));
}

}  // namespace

TEST_CASE("tail_fraction counts inclusively") {
    CHECK(tail_fraction(kScores, 0.7) == 0.5);
    CHECK(tail_fraction(kScores, 0.0) == 1.0);
    const std::vector<double> ties{0.5, 0.5};
    CHECK(tail_fraction(ties, 0.5) == 1.0);
    CHECK_THROWS_AS(tail_fraction(std::vector<double>{}, 0.5), DataError);
}

TEST_CASE("labeled tail_fraction restricts to the observed subset") {
    CHECK(tail_fraction(kScores, kLabeled, 0.8) == 0.5);
    CHECK(tail_fraction(kScores, kLabeled, 0.7) == 1.0);
    CHECK_THROWS_WITH_AS(tail_fraction(kScores, std::vector<std::size_t>{}, 0.5),
                         "no observed positives for label", DataError);
}

TEST_CASE("ucb_objective reproduces hand-computed values") {
    // 0.5/1 + 1.01 * (sqrt(ln8/12) + sqrt(ln8/4))
    CHECK(ucb_objective(kScores, kLabeled, 0.7, kWorkedCfg) ==
          doctest::Approx(1.6487).epsilon(1e-4));
    CHECK(ucb_objective(kScores, kLabeled, 0.9, kWorkedCfg) ==
          doctest::Approx(2.6307).epsilon(1e-4));
    CHECK(ucb_objective(kScores, kLabeled, 0.7, kWorkedCfg) ==
          doctest::Approx(oracle_objective(kScores, kLabeled, 0.7, kWorkedCfg))
              .epsilon(1e-14));
}

TEST_CASE("ucb_objective approaches the plain ratio as the penalty vanishes") {
    // Huge n with tau near zero: penalty term is negligible.
    std::vector<double> scores(200000);
    std::vector<std::size_t> labeled;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        scores[i] = i < scores.size() / 2 ? 0.9 : 0.1;
        if (i < scores.size() / 4) labeled.push_back(i);
    }
    const EstimatorConfig cfg{0.5, 1e-9};
    const double obj = ucb_objective(scores, labeled, 0.9, cfg);
    CHECK(obj == doctest::Approx(0.5).epsilon(1e-2));
}

TEST_CASE("ucb_objective rejects thresholds with empty labeled tail") {
    CHECK_THROWS_AS(ucb_objective(kScores, std::vector<std::size_t>{3}, 0.7, kWorkedCfg),
                    DataError);
}

TEST_CASE("worked six-sample estimate") {
    const auto result = estimate_prior(kScores, kLabeled, kWorkedCfg);
    CHECK(result.threshold == 0.7);
    CHECK(result.prior == 0.5);

    // Exhaustive oracle over every candidate threshold.
    double best_obj = 1e300, best_z = 0.0;
    for (double z : kScores) {
        double qp = 0.0;
        for (std::size_t i : kLabeled) qp += kScores[i] >= z ? 1.0 : 0.0;
        if (qp == 0.0) continue;
        const double obj = oracle_objective(kScores, kLabeled, z, kWorkedCfg);
        if (obj < best_obj || (obj == best_obj && z < best_z)) {
            best_obj = obj;
            best_z = z;
        }
    }
    CHECK(result.threshold == best_z);
    CHECK(result.objective == doctest::Approx(best_obj).epsilon(1e-12));
}

TEST_CASE("identical scores force a prior of one") {
    const std::vector<double> flat(6, 0.7);
    const auto result = estimate_prior(flat, std::vector<std::size_t>{1, 4}, kWorkedCfg);
    CHECK(result.prior == 1.0);
    CHECK(result.threshold == 0.7);
}

TEST_CASE("two-candidate comparison picks the separating threshold") {
    const std::vector<double> scores{1.0, 1.0, 0.0, 0.0};
    const std::vector<std::size_t> labeled{0, 1};
    const auto result = estimate_prior(scores, labeled, kWorkedCfg);
    CHECK(result.threshold == 1.0);
    CHECK(result.prior == 0.5);
}

TEST_CASE("estimated prior is clamped into [1/n, 1]") {
    // Labeled score below most of the sample pushes the raw ratio above 1.
    const std::vector<double> scores{0.9, 0.8, 0.7, 0.1};
    const auto result = estimate_prior(scores, std::vector<std::size_t>{3}, kWorkedCfg);
    CHECK(result.prior <= 1.0);
    CHECK(result.prior >= 0.25);
}

TEST_CASE("tail fractions are nonincreasing in z") {
    ScoreFixture fx = score_fixture(500, 0.4, 0.5, 1.0, 0.0, 0.5, 0.5, 21);
    std::vector<double> zs = fx.scores;
    std::sort(zs.begin(), zs.end());
    double prev_q = 2.0, prev_qp = 2.0;
    for (double z : zs) {
        const double q = tail_fraction(fx.scores, z);
        const double qp = tail_fraction(fx.scores, fx.labeled, z);
        CHECK(q <= prev_q);
        CHECK(qp <= prev_qp);
        prev_q = q;
        prev_qp = qp;
    }
}

TEST_CASE("ratio term is invariant under sample duplication") {
    ScoreFixture fx = score_fixture(200, 0.3, 0.6, 1.0, 0.0, 0.4, 0.5, 33);
    std::vector<double> doubled = fx.scores;
    doubled.insert(doubled.end(), fx.scores.begin(), fx.scores.end());
    std::vector<std::size_t> doubled_labeled = fx.labeled;
    for (std::size_t i : fx.labeled) doubled_labeled.push_back(i + fx.scores.size());

    for (double z : {0.2, 0.5, 0.65, 0.8}) {
        const double ratio = tail_fraction(fx.scores, z) / tail_fraction(fx.scores, fx.labeled, z);
        const double ratio2 =
            tail_fraction(doubled, z) / tail_fraction(doubled, doubled_labeled, z);
        CHECK(ratio == doctest::Approx(ratio2).epsilon(1e-12));
    }
}

TEST_CASE("estimate_all_priors reduces to estimate_prior for one label") {
    ScoreFixture fx = score_fixture(100, 0.3, 0.6, 1.0, 0.0, 0.4, 0.5, 17);
    Matrix probs(fx.scores.size(), 1);
    for (std::size_t i = 0; i < fx.scores.size(); ++i) probs(i, 0) = fx.scores[i];

    SinglePositiveDataset sp;
    sp.features = Matrix(fx.scores.size(), 1);
    sp.num_classes = 1;
    sp.observed.assign(fx.scores.size(), 0);

    // estimate_all_priors takes the labeled set from the dataset, so compare
    // against estimate_prior on the full index set.
    const auto all = estimate_all_priors(probs, sp, EstimatorConfig{});
    std::vector<std::size_t> everyone(fx.scores.size());
    for (std::size_t i = 0; i < everyone.size(); ++i) everyone[i] = i;
    const auto single = estimate_prior(fx.scores, everyone, EstimatorConfig{});
    CHECK(all.priors[0] == single.prior);
    CHECK(all.thresholds[0] == single.threshold);
    CHECK(all.objectives[0] == single.objective);
}

TEST_CASE("constant probability column forces prior one") {
    Matrix probs(40, 2);
    for (std::size_t i = 0; i < 40; ++i) {
        probs(i, 0) = 0.6;
        probs(i, 1) = (i % 2) ? 0.9 : 0.2;
    }
    SinglePositiveDataset sp;
    sp.features = Matrix(40, 1);
    sp.num_classes = 2;
    sp.observed.assign(40, 0);
    for (std::size_t i = 0; i < 40; i += 4) sp.observed[i] = 1;
    const auto est = estimate_all_priors(probs, sp, EstimatorConfig{});
    CHECK(est.priors[0] == 1.0);
}

TEST_CASE("labels without observed positives need a previous estimate") {
    Matrix probs(10, 2);
    for (std::size_t i = 0; i < 10; ++i) {
        probs(i, 0) = 0.1 + 0.08 * double(i);
        probs(i, 1) = 0.5;
    }
    SinglePositiveDataset sp;
    sp.features = Matrix(10, 1);
    sp.num_classes = 2;
    sp.observed.assign(10, 0);  // label 1 never observed

    CHECK_THROWS_AS(estimate_all_priors(probs, sp, EstimatorConfig{}), DataError);

    PriorEstimate previous;
    previous.priors = {0.9, 0.33};
    previous.thresholds = {0.5, 0.77};
    previous.objectives = {1.0, 2.0};
    previous.labeled_counts = {5, 5};
    previous.reused = {0, 0};
    previous.total_count = 10;
    const auto est = estimate_all_priors(probs, sp, EstimatorConfig{}, &previous);
    CHECK(est.priors[1] == 0.33);
    CHECK(est.thresholds[1] == 0.77);
    CHECK(est.reused[1] == 1);
    CHECK(est.reused[0] == 0);
    CHECK(est.labeled_counts[0] == 10);
}

TEST_CASE("synthetic separable scores recover the prior") {
    // Positives on [0.6, 1], negatives on [0, 0.4], 20% of positives labeled.
    ScoreFixture fx = score_fixture(10000, 0.3, 0.6, 1.0, 0.0, 0.4, 0.2, 5);
    Matrix probs(fx.scores.size(), 1);
    for (std::size_t i = 0; i < fx.scores.size(); ++i) probs(i, 0) = fx.scores[i];
    const auto single = estimate_prior(fx.scores, fx.labeled, EstimatorConfig{0.5, 0.01});
    CHECK(single.prior >= 0.25);
    CHECK(single.prior <= 0.35);
}

TEST_CASE("estimator is deterministic") {
    ScoreFixture fx = score_fixture(1000, 0.3, 0.5, 1.0, 0.0, 0.5, 0.3, 9);
    const auto a = estimate_prior(fx.scores, fx.labeled, EstimatorConfig{});
    const auto b = estimate_prior(fx.scores, fx.labeled, EstimatorConfig{});
    CHECK(a.prior == b.prior);
    CHECK(a.threshold == b.threshold);
    CHECK(a.objective == b.objective);
}

TEST_CASE("prior estimates converge on the separable fixture") {
    // Median absolute error over 20 seeds, nonincreasing in n and small at
    // n = 10000.
    std::vector<double> medians;
    for (std::size_t n : {100u, 1000u, 10000u}) {
        std::vector<double> errors;
        for (std::uint64_t seed = 0; seed < 20; ++seed) {
            ScoreFixture fx = score_fixture(n, 0.3, 0.6, 1.0, 0.0, 0.4, 0.2, seed);
            const auto est = estimate_prior(fx.scores, fx.labeled, EstimatorConfig{});
            errors.push_back(std::fabs(est.prior - fx.true_pi));
        }
        std::sort(errors.begin(), errors.end());
        medians.push_back(0.5 * (errors[9] + errors[10]));
    }
    CHECK(medians[1] <= medians[0]);
    CHECK(medians[2] <= medians[1]);
    CHECK(medians[2] <= 0.05);
}
