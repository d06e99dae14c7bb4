#include <cmath>
#include <vector>

#include "doctest.h"

#include "csq/annotator.hpp"
#include "csq/conformal.hpp"
#include "test_util.hpp"

using namespace csq;

TEST_CASE("noiseless perception returns the truth") {
    RngStream rng(RngSeed{1}, "noise", 1);
    for (int i = 0; i < 100; ++i) CHECK(perceive_label(3, 10, NoiseModel{0.0}, rng) == 3);
}

TEST_CASE("near-total noise on two classes flips almost always") {
    RngStream rng(RngSeed{2}, "noise", 1);
    const double eps = 1.0 - 1e-3;
    int flipped = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        if (perceive_label(0, 2, NoiseModel{eps}, rng) == 1) ++flipped;
    }
    const double rate = static_cast<double>(flipped) / n;
    const double se = std::sqrt(eps * (1.0 - eps) / n);
    CHECK(std::abs(rate - eps) <= 3.0 * se + 1e-6);
}

TEST_CASE("misperception frequency tracks epsilon") {
    RngStream rng(RngSeed{3}, "noise", 1);
    const double eps = 0.1;
    int wrong = 0;
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        if (perceive_label(4, 7, NoiseModel{eps}, rng) != 4) ++wrong;
    }
    const double rate = static_cast<double>(wrong) / n;
    CHECK(std::abs(rate - eps) <= 0.003);
}

TEST_CASE("wrong perceptions are uniform over the other classes") {
    RngStream rng(RngSeed{4}, "noise", 1);
    const int L = 5;
    int counts[5] = {};
    const int n = 50000;
    for (int i = 0; i < n; ++i) ++counts[perceive_label(2, L, NoiseModel{0.8}, rng)];
    CHECK(counts[2] > 0);
    for (int c = 0; c < L; ++c) {
        if (c == 2) continue;
        // Each wrong class should get about 0.8/4 = 20% of draws.
        CHECK(std::abs(counts[c] / static_cast<double>(n) - 0.2) < 0.01);
    }
}

TEST_CASE("answer_query covers both stages") {
    const CandidateSet small{{2, 5}};

    const QueryOutcome in = answer_query(2, small, 16);
    CHECK(in.returned_label == 2);
    CHECK_FALSE(in.second_stage_used);
    CHECK(in.cost.bits == doctest::Approx(std::log2(3.0)).epsilon(1e-12));

    const QueryOutcome out = answer_query(7, small, 16);
    CHECK(out.returned_label == 7);
    CHECK(out.second_stage_used);
    CHECK(out.cost.bits == doctest::Approx(std::log2(3.0) + std::log2(14.0)).epsilon(1e-12));

    CandidateSet full;
    for (int c = 0; c < 16; ++c) full.classes.push_back(c);
    const QueryOutcome conv = answer_query(11, full, 16);
    CHECK(conv.returned_label == 11);
    CHECK_FALSE(conv.second_stage_used);
    CHECK(conv.cost.bits == doctest::Approx(4.0).epsilon(1e-12));

    CHECK_THROWS(answer_query(0, CandidateSet{}, 4));
}

TEST_CASE("mean realized cost tracks the expected-cost model on calibrated sets") {
    // Noiseless annotator answering conformal sets built from an exchangeable
    // calibration split: the realized mean cost may not exceed the per-sample
    // expected cost evaluated at the empirical miss rate, up to sampling error.
    const int L = 10;
    const int n_cal = 400, m_eval = 1200;
    const double alpha = 0.15;
    for (std::uint64_t trial = 0; trial < 10; ++trial) {
        RngStream rng(RngSeed{trial}, "ann-cost");
        const auto sample = testutil::frozen_classifier_sample(n_cal + m_eval, L, rng);
        std::vector<int> cal_pos(n_cal), eval_pos(m_eval);
        for (int i = 0; i < n_cal; ++i) cal_pos[static_cast<std::size_t>(i)] = i;
        for (int i = 0; i < m_eval; ++i) eval_pos[static_cast<std::size_t>(i)] = n_cal + i;
        const ProbMatrix cal = sample.probs.gather(cal_pos);
        const std::vector<int> cal_labels(sample.labels.begin(), sample.labels.begin() + n_cal);
        const Quantile q = empirical_quantile(conformal_scores(cal, cal_labels), alpha);
        const auto sets = candidate_sets_for(sample.probs.gather(eval_pos), alpha, q);
        const std::vector<int> eval_labels(sample.labels.begin() + n_cal, sample.labels.end());

        double cost_sum = 0.0, cost_sq = 0.0;
        RngStream noise(RngSeed{trial}, "ann-noise");
        for (int i = 0; i < m_eval; ++i) {
            const int perceived = perceive_label(eval_labels[static_cast<std::size_t>(i)], L,
                                                 NoiseModel{0.0}, noise);
            const QueryOutcome out = answer_query(perceived, sets[static_cast<std::size_t>(i)], L);
            CHECK(out.returned_label == eval_labels[static_cast<std::size_t>(i)]);
            cost_sum += out.cost.bits;
            cost_sq += out.cost.bits * out.cost.bits;
        }
        const double mean_cost = cost_sum / m_eval;
        const double se =
            std::sqrt(std::max(cost_sq / m_eval - mean_cost * mean_cost, 0.0) / m_eval);

        const double miss = 1.0 - inclusion_rate(sets, eval_labels);
        double expected_sum = 0.0;
        for (const auto& set : sets) expected_sum += expected_cost(L, set.size(), miss).bits;
        CHECK(mean_cost <= expected_sum / m_eval + 3.0 * se);
    }
}

TEST_CASE("outcome cost always equals the cost model") {
    RngStream rng(RngSeed{5}, "annotator");
    for (int t = 0; t < 300; ++t) {
        const int L = 2 + static_cast<int>(rng.uniform_below(20));
        const int k = 1 + static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(L)));
        CandidateSet set;
        // k distinct classes starting at a random offset.
        const int start = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(L)));
        for (int i = 0; i < k; ++i) set.classes.push_back((start + i) % L);
        const int perceived = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(L)));
        const QueryOutcome out = answer_query(perceived, set, L);
        CHECK(out.cost.bits == query_cost(L, k, !out.second_stage_used).bits);
        CHECK(out.second_stage_used == (!set.contains(perceived) && k < L));
        CHECK(out.returned_label == perceived);
    }
}
