// Times the OpenMP row-parallel kernels against their serial references and
// checks that both produce identical bits.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "csq/kernels.hpp"
#include "csq/rng.hpp"

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

csq::ProbMatrix random_probs(int n, int L, csq::RngStream& rng) {
    csq::ProbMatrix probs(n, L);
    for (int i = 0; i < n; ++i) {
        auto row = probs.row(i);
        double sum = 0.0;
        for (double& p : row) {
            p = -std::log(1.0 - rng.uniform01());
            sum += p;
        }
        for (double& p : row) p /= sum;
    }
    return probs;
}

template <typename F>
double time_best_of(int reps, F&& f) {
    double best = 1e30;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = Clock::now();
        f();
        best = std::min(best, seconds_since(t0));
    }
    return best;
}

void report(const char* name, double serial_s, double parallel_s, bool identical) {
    std::printf("%-22s serial %8.3f ms   parallel %8.3f ms   speedup %5.2fx   %s\n", name,
                serial_s * 1e3, parallel_s * 1e3, serial_s / parallel_s,
                identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main() {
    const int n = 200000;
    const int L = 50;
    const int d = 32;
    const int reps = 5;

#ifdef _OPENMP
    std::printf("OpenMP threads: %d\n", omp_get_max_threads());
#else
    std::printf("OpenMP not enabled; parallel entry points run serially\n");
#endif

    csq::RngStream rng(csq::RngSeed{7}, "bench");

    std::vector<double> features(static_cast<std::size_t>(n) * d);
    for (double& x : features) x = rng.normal();
    std::vector<double> weights(static_cast<std::size_t>(L) * d);
    for (double& w : weights) w = 0.1 * rng.normal();
    std::vector<double> bias(L);
    for (double& b : bias) b = 0.1 * rng.normal();
    std::vector<double> mean(d, 0.0), inv_std(d, 1.0);
    std::vector<int> ids(n);
    for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;

    bool all_identical = true;

    {
        csq::ProbMatrix out_s(n, L), out_p(n, L);
        const double ts = time_best_of(reps, [&] {
            csq::kernels::softmax_predict_rows_serial(features.data(), d, ids, weights.data(),
                                                      bias.data(), mean.data(), inv_std.data(), L,
                                                      out_s);
        });
        const double tp = time_best_of(reps, [&] {
            csq::kernels::softmax_predict_rows(features.data(), d, ids, weights.data(),
                                               bias.data(), mean.data(), inv_std.data(), L, out_p);
        });
        bool same = true;
        for (std::size_t k = 0; k < static_cast<std::size_t>(n) * L; ++k)
            same = same && out_s.data()[k] == out_p.data()[k];
        all_identical = all_identical && same;
        report("softmax_predict_rows", ts, tp, same);
    }

    const csq::ProbMatrix probs = random_probs(n, L, rng);

    {
        std::vector<double> out_s(n), out_p(n);
        const double ts =
            time_best_of(reps, [&] { csq::kernels::entropy_rows_serial(probs, out_s); });
        const double tp = time_best_of(reps, [&] { csq::kernels::entropy_rows(probs, out_p); });
        bool same = true;
        for (int i = 0; i < n; ++i)
            same = same && out_s[static_cast<std::size_t>(i)] == out_p[static_cast<std::size_t>(i)];
        all_identical = all_identical && same;
        report("entropy_rows", ts, tp, same);
    }

    {
        const double quantile = 0.98;
        std::vector<csq::CandidateSet> sets_s, sets_p;
        const double ts = time_best_of(
            reps, [&] { sets_s = csq::kernels::threshold_sets_serial(probs, quantile); });
        const double tp =
            time_best_of(reps, [&] { sets_p = csq::kernels::threshold_sets(probs, quantile); });
        bool same = sets_s.size() == sets_p.size();
        for (std::size_t i = 0; same && i < sets_s.size(); ++i)
            same = sets_s[i].classes == sets_p[i].classes;
        all_identical = all_identical && same;
        report("threshold_sets", ts, tp, same);
    }

    return all_identical ? 0 : 1;
}
