#include <algorithm>
#include <cmath>
#include <vector>

#include "doctest.h"

#include "csq/conformal.hpp"
#include "csq/rng.hpp"
#include "test_util.hpp"

using namespace csq;

namespace {

ProbMatrix matrix_from(std::initializer_list<std::initializer_list<double>> rows) {
    const int r = static_cast<int>(rows.size());
    const int c = static_cast<int>(rows.begin()->size());
    ProbMatrix m(r, c);
    int i = 0;
    for (const auto& row : rows) {
        std::copy(row.begin(), row.end(), m.row(i).begin());
        ++i;
    }
    return m;
}

}  // namespace

TEST_CASE("conformal scores") {
    const ProbMatrix probs = matrix_from(
        {{0.7, 0.2, 0.1, 0.0}, {0.0, 1.0, 0.0, 0.0}, {0.25, 0.25, 0.25, 0.25}});
    const ScoreSet s = conformal_scores(probs, std::vector<int>{0, 1, 2});
    CHECK(s.values[0] == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(s.values[1] == 0.0);
    CHECK(s.values[2] == doctest::Approx(0.75).epsilon(1e-12));
    CHECK_THROWS(conformal_scores(probs, std::vector<int>{0}));
}

TEST_CASE("empirical quantile walks the score CDF") {
    const ScoreSet s{{0.1, 0.2, 0.3, 0.4, 0.5}};
    CHECK(empirical_quantile(s, 0.2).value == 0.4);
    CHECK(empirical_quantile(s, 0.9).value == 0.1);
    CHECK(empirical_quantile(s, 1e-9).value == 0.5);
    CHECK_THROWS(empirical_quantile(ScoreSet{}, 0.5));
    CHECK_THROWS(empirical_quantile(s, 0.0));
    CHECK_THROWS(empirical_quantile(s, 1.0));
}

TEST_CASE("quantile is anti-monotone in alpha") {
    RngStream rng(RngSeed{77}, "quantile");
    for (int t = 0; t < 50; ++t) {
        ScoreSet s;
        const int n = 1 + static_cast<int>(rng.uniform_below(60));
        for (int i = 0; i < n; ++i) s.values.push_back(rng.uniform01());
        double prev = 2.0;
        for (double alpha : {0.01, 0.1, 0.3, 0.5, 0.7, 0.9, 0.99}) {
            const double q = empirical_quantile(s, alpha).value;
            CHECK(q <= prev);
            prev = q;
        }
    }
}

TEST_CASE("candidate set thresholding, ordering and fallback") {
    CHECK(candidate_set(std::vector<double>{0.70, 0.20, 0.05, 0.05}, Quantile{0.35, 0.1}).classes ==
          std::vector<int>{0});
    // Quantile 1 admits everything, ordered by descending probability.
    CHECK(candidate_set(std::vector<double>{0.2, 0.5, 0.3}, Quantile{1.0, 0.1}).classes ==
          std::vector<int>{1, 2, 0});
    // Nothing passes: fall back to the argmax singleton.
    CHECK(candidate_set(std::vector<double>{0.4, 0.3, 0.2, 0.1}, Quantile{0.5, 0.1}).classes ==
          std::vector<int>{0});
    // Tie on probability orders by class id.
    CHECK(candidate_set(std::vector<double>{0.25, 0.25, 0.25, 0.25}, Quantile{0.9, 0.1}).classes ==
          std::vector<int>{0, 1, 2, 3});
}

TEST_CASE("fallback never fires once the quantile covers the top class") {
    RngStream rng(RngSeed{78}, "fallback");
    for (int t = 0; t < 200; ++t) {
        const int L = 2 + static_cast<int>(rng.uniform_below(8));
        ProbMatrix m = testutil::random_prob_matrix(1, L, rng);
        const auto row = m.row(0);
        const double max_p = *std::max_element(row.begin(), row.end());
        const double q = 1.0 - max_p;  // exactly the top class score
        const CandidateSet set = candidate_set(row, Quantile{q, 0.5});
        CHECK(set.size() >= 1);
        // The top class itself passes, so the fallback path cannot be the
        // reason the set is non-empty.
        CHECK(1.0 - row[static_cast<std::size_t>(set.classes.front())] <= q);
    }
}

TEST_CASE("candidate_sets_for: alpha zero is the exhaustive query") {
    RngStream rng(RngSeed{79}, "sets");
    const ProbMatrix probs = testutil::random_prob_matrix(20, 6, rng);
    const auto sets = candidate_sets_for(probs, 0.0, std::nullopt);
    for (const auto& set : sets) CHECK(set.size() == 6);
    CHECK_THROWS(candidate_sets_for(probs, 0.2, std::nullopt));
}

TEST_CASE("candidate_sets_for matches per-row candidate_set and is deterministic") {
    RngStream rng(RngSeed{80}, "sets");
    const ProbMatrix probs = testutil::random_prob_matrix(40, 5, rng);
    const Quantile q{0.55, 0.2};
    const auto sets = candidate_sets_for(probs, 0.2, q);
    const auto again = candidate_sets_for(probs, 0.2, q);
    for (int i = 0; i < probs.rows(); ++i) {
        CHECK(sets[static_cast<std::size_t>(i)].classes == candidate_set(probs.row(i), q).classes);
        CHECK(sets[static_cast<std::size_t>(i)].classes == again[static_cast<std::size_t>(i)].classes);
    }
}

TEST_CASE("set nesting: larger quantile gives a superset") {
    RngStream rng(RngSeed{81}, "nesting");
    for (int t = 0; t < 100; ++t) {
        const int L = 3 + static_cast<int>(rng.uniform_below(7));
        const ProbMatrix m = testutil::random_prob_matrix(1, L, rng);
        const double q1 = rng.uniform01();
        const double q2 = q1 + (1.0 - q1) * rng.uniform01();
        std::vector<int> small;
        std::vector<int> big;
        for (int c = 0; c < L; ++c) {
            const double score = 1.0 - m.row(0)[static_cast<std::size_t>(c)];
            if (score <= q1) small.push_back(c);
            if (score <= q2) big.push_back(c);
        }
        for (int c : small) CHECK(std::find(big.begin(), big.end(), c) != big.end());
    }
}

TEST_CASE("inclusion rate") {
    RngStream rng(RngSeed{82}, "incl");
    const ProbMatrix probs = testutil::random_prob_matrix(10, 4, rng);
    const auto full = candidate_sets_for(probs, 0.0, std::nullopt);
    std::vector<int> labels(10, 2);
    CHECK(inclusion_rate(full, labels) == 1.0);
    std::vector<CandidateSet> singletons(10, CandidateSet{{2}});
    CHECK(inclusion_rate(singletons, labels) == 1.0);
    labels[0] = 1;
    CHECK(inclusion_rate(singletons, labels) == doctest::Approx(0.9).epsilon(1e-12));
    CHECK_THROWS(inclusion_rate(std::vector<CandidateSet>{}, std::vector<int>{}));
}

TEST_CASE("optimize_alpha on the worked two-sample example") {
    const ProbMatrix cal = matrix_from({{0.6, 0.2, 0.1, 0.1}, {0.4, 0.3, 0.2, 0.1}});
    const std::vector<int> labels{0, 1};
    const AlphaGrid grid(std::vector<double>{0.0, 0.4, 0.6});
    const AlphaChoice choice = optimize_alpha(cal, labels, grid, 4);
    CHECK(choice.alpha_star == 0.4);
    REQUIRE(choice.quantile.has_value());
    CHECK(choice.quantile->value == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(choice.total_cost.bits == doctest::Approx(1.0 + std::log2(3.0)).epsilon(1e-12));
}

TEST_CASE("optimize_alpha with the degenerate grid") {
    RngStream rng(RngSeed{83}, "opt");
    const ProbMatrix cal = testutil::random_prob_matrix(7, 5, rng);
    std::vector<int> labels(7);
    for (auto& y : labels) y = static_cast<int>(rng.uniform_below(5));
    const AlphaChoice choice = optimize_alpha(cal, labels, AlphaGrid(std::vector<double>{0.0}), 5);
    CHECK(choice.alpha_star == 0.0);
    CHECK_FALSE(choice.quantile.has_value());
    CHECK(choice.total_cost.bits == doctest::Approx(7.0 * std::log2(5.0)).epsilon(1e-12));
}

TEST_CASE("optimize_alpha equals brute force and ignores permutations") {
    RngStream rng(RngSeed{84}, "opt-prop");
    for (int t = 0; t < 30; ++t) {
        const int L = 3 + static_cast<int>(rng.uniform_below(5));
        const int n = 2 + static_cast<int>(rng.uniform_below(30));
        const ProbMatrix cal = testutil::random_prob_matrix(n, L, rng);
        std::vector<int> labels(static_cast<std::size_t>(n));
        for (auto& y : labels) y = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(L)));

        std::vector<double> grid_values{0.0};
        const int extra = 1 + static_cast<int>(rng.uniform_below(8));
        for (int g = 0; g < extra; ++g) {
            const double a = rng.uniform01() * 0.95;
            if (std::find(grid_values.begin(), grid_values.end(), a) == grid_values.end())
                grid_values.push_back(a);
        }
        const AlphaGrid grid(grid_values);
        const AlphaChoice fast = optimize_alpha(cal, labels, grid, L);

        // Brute force every grid point independently.
        double best_total = 0.0;
        double best_alpha = -1.0;
        for (double alpha : grid.values()) {
            std::vector<double> costs;
            std::optional<Quantile> q;
            if (alpha > 0.0) q = empirical_quantile(conformal_scores(cal, labels), alpha);
            for (int i = 0; i < n; ++i) {
                const CandidateSet set =
                    alpha == 0.0 ? candidate_set(cal.row(i), Quantile{1.0, 0.0})
                                 : candidate_set(cal.row(i), *q);
                costs.push_back(
                    query_cost(L, set.size(), set.contains(labels[static_cast<std::size_t>(i)])).bits);
            }
            std::sort(costs.begin(), costs.end());
            double total = 0.0;
            for (double c : costs) total += c;
            if (best_alpha < 0.0 || total < best_total) {
                best_total = total;
                best_alpha = alpha;
            }
        }
        CHECK(fast.alpha_star == best_alpha);
        CHECK(fast.total_cost.bits == best_total);

        // Permuting the calibration set must not change the outcome.
        std::vector<int> perm(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
        for (int i = n - 1; i > 0; --i) {
            const auto j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(i) + 1));
            std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
        }
        const ProbMatrix shuffled_probs = cal.gather(perm);
        std::vector<int> shuffled_labels(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            shuffled_labels[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])];
        const AlphaChoice shuffled = optimize_alpha(shuffled_probs, shuffled_labels, grid, L);
        CHECK(shuffled.alpha_star == fast.alpha_star);
        CHECK(shuffled.total_cost.bits == fast.total_cost.bits);
    }
}

TEST_CASE("coverage holds within three sigma on exchangeable splits") {
    // Small-scale version of the acceptance criterion: 30 trials, one alpha.
    const double alpha = 0.1;
    const int n_cal = 400;
    const int m_eval = 1000;
    int ok = 0;
    for (int trial = 0; trial < 30; ++trial) {
        RngStream rng(RngSeed{static_cast<std::uint64_t>(trial)}, "coverage-unit");
        const auto sample = testutil::frozen_classifier_sample(n_cal + m_eval, 10, rng);
        std::vector<int> cal_pos, eval_pos;
        for (int i = 0; i < n_cal; ++i) cal_pos.push_back(i);
        for (int i = n_cal; i < n_cal + m_eval; ++i) eval_pos.push_back(i);

        const ProbMatrix cal = sample.probs.gather(cal_pos);
        const std::vector<int> cal_labels(sample.labels.begin(), sample.labels.begin() + n_cal);
        const Quantile q = empirical_quantile(conformal_scores(cal, cal_labels), alpha);

        const ProbMatrix eval = sample.probs.gather(eval_pos);
        const std::vector<int> eval_labels(sample.labels.begin() + n_cal, sample.labels.end());
        const auto sets = candidate_sets_for(eval, alpha, q);
        const double rate = inclusion_rate(sets, eval_labels);
        const double slack = 3.0 * std::sqrt(alpha * (1.0 - alpha) / m_eval);
        if (rate >= 1.0 - alpha - slack) ++ok;
    }
    CHECK(ok >= 28);
}

TEST_CASE("alpha grid validation") {
    CHECK_THROWS(AlphaGrid(std::vector<double>{0.1, 0.2}));       // missing zero
    CHECK_THROWS(AlphaGrid(std::vector<double>{0.0, 1.0}));       // 1 not allowed
    CHECK_THROWS(AlphaGrid(std::vector<double>{0.0, 0.1, 0.1}));  // duplicate
    CHECK_THROWS(AlphaGrid(std::vector<double>{}));
    const AlphaGrid grid = AlphaGrid::default_grid();
    CHECK(grid.values().size() == 100);
    CHECK(grid.values().front() == 0.0);
    CHECK(grid.values().back() == doctest::Approx(0.99).epsilon(1e-12));
}
