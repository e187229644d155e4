#include "crisp/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "crisp/errors.hpp"
#include "crisp/rng.hpp"

namespace crisp {

namespace {

void normalize(std::vector<double>& v) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (norm == 0.0) throw std::runtime_error("degenerate direction");
    for (double& x : v) x /= norm;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

}  // namespace

void SynthConfig::validate() const {
    if (n < 10 * c || c < 1 || q < 1)
        throw std::invalid_argument("synth: need n >= 10*c and positive dims");
    if (target_priors.size() != c) throw std::invalid_argument("synth: prior count mismatch");
    for (double p : target_priors)
        if (!(p > 0.0 && p < 1.0))
            throw std::invalid_argument("synth: priors must lie in (0,1)");
    if (!(separability >= 0.0)) throw std::invalid_argument("synth: separability must be >= 0");
    if (!(label_correlation >= 0.0 && label_correlation < 1.0))
        throw std::invalid_argument("synth: label_correlation must lie in [0,1)");
}

SynthResult generate(const SynthConfig& cfg) {
    cfg.validate();
    const std::size_t n = cfg.n, q = cfg.q, c = cfg.c;
    Rng rng(cfg.seed);

    Matrix features(n, q);
    for (double& v : features.values()) v = rng.normal();

    // Random per-label directions, Gram-Schmidt orthogonalized while q
    // allows, then mixed with a shared latent direction.
    std::vector<std::vector<double>> dirs(c, std::vector<double>(q));
    for (auto& d : dirs) {
        for (double& x : d) x = rng.normal();
        normalize(d);
    }
    for (std::size_t j = 0; j < c && j < q; ++j) {
        for (std::size_t k = 0; k < j; ++k) {
            const double proj = dot(dirs[j], dirs[k]);
            for (std::size_t i = 0; i < q; ++i) dirs[j][i] -= proj * dirs[k][i];
        }
        normalize(dirs[j]);
    }
    if (cfg.label_correlation > 0.0) {
        std::vector<double> shared(q);
        for (double& x : shared) x = rng.normal();
        normalize(shared);
        for (auto& d : dirs) {
            for (std::size_t i = 0; i < q; ++i)
                d[i] = (1.0 - cfg.label_correlation) * d[i] + cfg.label_correlation * shared[i];
            normalize(d);
        }
    }

    SynthResult result;
    result.data.features = features;
    result.data.labels = Matrix(n, c);
    result.realized_priors.assign(c, 0.0);

    Matrix projections(n, c);
    for (std::size_t j = 0; j < c; ++j) {
#pragma omp parallel for schedule(static) if (n * q >= 8192)
        for (std::size_t i = 0; i < n; ++i) {
            double p = 0.0;
            const double* x = features.row(i);
            for (std::size_t k = 0; k < q; ++k) p += dirs[j][k] * x[k];
            projections(i, j) = p;
        }

        const auto k_pos = static_cast<std::size_t>(
            std::lround(cfg.target_priors[j] * double(n)));
        if (k_pos == 0)
            throw DataError("synth: prior " + std::to_string(cfg.target_priors[j]) +
                            " yields zero positives at n=" + std::to_string(n));

        // Quantile cut: the top k_pos projections are the positives. Index
        // tie-break keeps the count exact even if projections collide.
        std::vector<std::size_t> order(n);
        for (std::size_t i = 0; i < n; ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            if (projections(a, j) != projections(b, j))
                return projections(a, j) > projections(b, j);
            return a < b;
        });
        for (std::size_t r = 0; r < k_pos; ++r) result.data.labels(order[r], j) = 1.0;
        result.realized_priors[j] = double(k_pos) / double(n);
    }

    // Margin push: move every instance away from each cut along that label's
    // direction. Labels were fixed above, so realized priors are unaffected.
    if (cfg.separability > 0.0) {
        for (std::size_t j = 0; j < c; ++j) {
#pragma omp parallel for schedule(static) if (n * q >= 8192)
            for (std::size_t i = 0; i < n; ++i) {
                const double push =
                    result.data.labels(i, j) != 0.0 ? cfg.separability : -cfg.separability;
                double* x = result.data.features.row(i);
                for (std::size_t k = 0; k < q; ++k) x[k] += push * dirs[j][k];
            }
        }
    }
    return result;
}

ScoreFixture score_fixture(std::size_t n, double pi, double pos_low, double pos_high,
                           double neg_low, double neg_high, double labeled_frac,
                           std::uint64_t seed) {
    if (n < 1 || !(pi > 0.0 && pi < 1.0))
        throw std::invalid_argument("score_fixture: need n >= 1 and pi in (0,1)");
    if (!(0.0 <= neg_low && neg_low <= neg_high && pos_low <= pos_high && pos_high <= 1.0))
        throw std::invalid_argument("score_fixture: score ranges must lie in [0,1]");
    if (!(labeled_frac > 0.0 && labeled_frac <= 1.0))
        throw std::invalid_argument("score_fixture: labeled_frac must lie in (0,1]");

    const auto k_pos = static_cast<std::size_t>(std::lround(pi * double(n)));
    if (k_pos == 0 || k_pos >= n)
        throw DataError("score_fixture: infeasible positive count");

    Rng rng(seed);
    ScoreFixture fx;
    fx.positive_count = k_pos;
    fx.true_pi = pi;
    fx.scores.resize(n);
    for (std::size_t i = 0; i < k_pos; ++i) fx.scores[i] = rng.uniform(pos_low, pos_high);
    for (std::size_t i = k_pos; i < n; ++i) fx.scores[i] = rng.uniform(neg_low, neg_high);

    const auto k_lab = static_cast<std::size_t>(std::lround(labeled_frac * double(k_pos)));
    if (k_lab == 0) throw DataError("score_fixture: labeled set is empty");
    std::vector<std::size_t> pos_idx(k_pos);
    for (std::size_t i = 0; i < k_pos; ++i) pos_idx[i] = i;
    rng.shuffle(pos_idx);
    fx.labeled.assign(pos_idx.begin(), pos_idx.begin() + k_lab);
    std::sort(fx.labeled.begin(), fx.labeled.end());
    return fx;
}

}  // namespace crisp
