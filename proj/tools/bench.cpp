// Times the OpenMP kernels against the serial reference implementations and
// reports the largest divergence between the two paths (expected: 0, the
// parallel kernels reduce in a fixed order).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "crisp/metrics.hpp"
#include "crisp/model.hpp"
#include "crisp/prior_estimator.hpp"
#include "crisp/reference.hpp"
#include "crisp/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

template <typename Fn>
double time_ms(Fn&& fn, int repeats = 3) {
    double best = 1e300;
    for (int r = 0; r < repeats; ++r) {
        const auto start = Clock::now();
        fn();
        const double ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
        if (ms < best) best = ms;
    }
    return best;
}

double max_abs_diff(const crisp::Matrix& a, const crisp::Matrix& b) {
    double worst = 0.0;
    for (std::size_t i = 0; i < a.values().size(); ++i)
        worst = std::max(worst, std::fabs(a.values()[i] - b.values()[i]));
    return worst;
}

void report(const char* name, double serial_ms, double parallel_ms, double diff) {
    std::printf("%-28s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   max|diff| %g\n",
                name, serial_ms, parallel_ms, serial_ms / parallel_ms, diff);
}

}  // namespace

int main() {
#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("built without OpenMP; both paths run serially\n");
#endif

    crisp::Rng rng(7);

    // Forward + backward through a one-hidden-layer model.
    {
        const std::size_t n = 4096, q = 256, h = 256, c = 64;
        const auto model = crisp::make_one_hidden(q, h, c, 11);
        crisp::Matrix X(n, q);
        for (double& v : X.values()) v = rng.normal();
        crisp::Matrix upstream(n, c);
        for (double& v : upstream.values()) v = rng.uniform(-1.0, 1.0);

        crisp::Matrix logits_par, logits_ser;
        const double par_ms = time_ms([&] { logits_par = crisp::forward_logits(model, X); });
        const double ser_ms = time_ms([&] { logits_ser = crisp::ref::forward_logits(model, X); });
        report("forward (mlp)", ser_ms, par_ms, max_abs_diff(logits_par, logits_ser));

        crisp::GradientSet g_par, g_ser;
        const double bpar_ms = time_ms([&] { g_par = crisp::backward(model, X, upstream); });
        const double bser_ms = time_ms([&] { g_ser = crisp::ref::backward(model, X, upstream); });
        double diff = 0.0;
        for (std::size_t li = 0; li < g_par.layers.size(); ++li)
            diff = std::max(diff, max_abs_diff(g_par.layers[li].weights,
                                               g_ser.layers[li].weights));
        report("backward (mlp)", bser_ms, bpar_ms, diff);
    }

    // Threshold search for the prior estimator, many labels at once.
    {
        const std::size_t n = 50000;
        std::vector<double> scores(n);
        for (double& s : scores) s = rng.uniform01();
        std::vector<std::size_t> labeled;
        for (std::size_t i = 0; i < n; ++i)
            if (scores[i] > 0.7 && rng.uniform01() < 0.2) labeled.push_back(i);

        const crisp::EstimatorConfig cfg;
        crisp::SingleLabelPrior par, ser;
        const double par_ms = time_ms([&] { par = crisp::estimate_prior(scores, labeled, cfg); });
        const double ser_ms =
            time_ms([&] { ser = crisp::ref::estimate_prior(scores, labeled, cfg); }, 1);
        report("prior threshold search", ser_ms, par_ms,
               std::max(std::fabs(par.prior - ser.prior),
                        std::fabs(par.threshold - ser.threshold)));
    }

    // Ranking metrics.
    {
        const std::size_t n = 2048, c = 64;
        crisp::Matrix probs(n, c), labels(n, c);
        for (double& v : probs.values()) v = rng.uniform01();
        for (double& v : labels.values()) v = rng.uniform01() < 0.2 ? 1.0 : 0.0;
        for (std::size_t i = 0; i < n; ++i) labels(i, i % c) = 1.0;

        double par = 0.0, ser = 0.0;
        const double par_ms = time_ms([&] { par = crisp::ranking_loss(probs, labels); });
        const double ser_ms = time_ms([&] { ser = crisp::ref::ranking_loss(probs, labels); }, 1);
        report("ranking loss", ser_ms, par_ms, std::fabs(par - ser));

        const double apar_ms = time_ms([&] { par = crisp::average_precision(probs, labels); });
        const double aser_ms =
            time_ms([&] { ser = crisp::ref::average_precision(probs, labels); }, 1);
        report("average precision", aser_ms, apar_ms, std::fabs(par - ser));
    }
    return 0;
}
