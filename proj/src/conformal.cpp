#include "csq/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "csq/kernels.hpp"

namespace csq {

AlphaGrid::AlphaGrid(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw std::invalid_argument("alpha grid: empty");
    std::sort(values_.begin(), values_.end());
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (values_[i] < 0.0 || values_[i] >= 1.0)
            throw std::invalid_argument("alpha grid: values must lie in [0,1)");
        if (i > 0 && values_[i] == values_[i - 1])
            throw std::invalid_argument("alpha grid: duplicate value");
    }
    if (values_.front() != 0.0) throw std::invalid_argument("alpha grid: must contain 0");
}

AlphaGrid AlphaGrid::default_grid() {
    std::vector<double> v(100);
    for (int i = 0; i < 100; ++i) v[static_cast<std::size_t>(i)] = i / 100.0;
    return AlphaGrid(std::move(v));
}

ScoreSet conformal_scores(const ProbMatrix& probs, std::span<const int> labels) {
    if (static_cast<std::size_t>(probs.rows()) != labels.size())
        throw std::invalid_argument("conformal_scores: rows and labels misaligned");
    ScoreSet s;
    s.values.reserve(labels.size());
    for (int i = 0; i < probs.rows(); ++i)
        s.values.push_back(1.0 - probs.row(i)[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])]);
    return s;
}

Quantile empirical_quantile(const ScoreSet& scores, double alpha) {
    if (scores.values.empty()) throw std::invalid_argument("empirical_quantile: empty score set");
    if (alpha <= 0.0 || alpha >= 1.0)
        throw std::invalid_argument("empirical_quantile: alpha must lie in (0,1)");

    std::vector<double> sorted = scores.values;
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    const double target = 1.0 - alpha;
    for (std::size_t j = 0; j < sorted.size(); ++j) {
        if (static_cast<double>(j + 1) / n >= target) return Quantile{sorted[j], alpha};
    }
    // The full count n/n == 1 always reaches the target.
    throw std::logic_error("empirical_quantile: empirical CDF never reached 1 - alpha");
}

CandidateSet candidate_set(std::span<const double> prob_row, const Quantile& q) {
    ProbMatrix one(1, static_cast<int>(prob_row.size()));
    std::copy(prob_row.begin(), prob_row.end(), one.row(0).begin());
    return kernels::threshold_sets_serial(one, q.value).front();
}

std::vector<CandidateSet> candidate_sets_for(const ProbMatrix& probs, double alpha,
                                             const std::optional<Quantile>& q) {
    if (alpha < 0.0 || alpha >= 1.0)
        throw std::invalid_argument("candidate_sets_for: alpha out of [0,1)");
    if (alpha == 0.0) {
        // Exhaustive sets; quantile 1 admits every class and orders the row.
        return kernels::threshold_sets(probs, 1.0);
    }
    if (!q) throw std::invalid_argument("candidate_sets_for: alpha > 0 requires a quantile");
    return kernels::threshold_sets(probs, q->value);
}

double inclusion_rate(std::span<const CandidateSet> sets, std::span<const int> labels) {
    if (sets.empty() || sets.size() != labels.size())
        throw std::invalid_argument("inclusion_rate: empty or misaligned input");
    int hit = 0;
    for (std::size_t i = 0; i < sets.size(); ++i) {
        if (sets[i].contains(labels[i])) ++hit;
    }
    return static_cast<double>(hit) / static_cast<double>(sets.size());
}

namespace {

// Totals are accumulated over sorted per-sample costs so the result does not
// depend on the order of the calibration set.
double canonical_total(std::vector<double>& costs) {
    std::sort(costs.begin(), costs.end());
    double total = 0.0;
    for (double c : costs) total += c;
    return total;
}

}  // namespace

AlphaChoice optimize_alpha(const ProbMatrix& cal_probs, std::span<const int> cal_labels,
                           const AlphaGrid& grid, int num_classes) {
    if (cal_probs.rows() == 0) throw std::invalid_argument("optimize_alpha: empty calibration set");
    if (static_cast<std::size_t>(cal_probs.rows()) != cal_labels.size())
        throw std::invalid_argument("optimize_alpha: probs and labels misaligned");
    if (cal_probs.cols() != num_classes)
        throw std::invalid_argument("optimize_alpha: class count mismatch");

    const ScoreSet scores = conformal_scores(cal_probs, cal_labels);
    const int n = cal_probs.rows();

    AlphaChoice best;
    bool have_best = false;
    std::vector<double> costs(static_cast<std::size_t>(n));

    for (double alpha : grid.values()) {
        std::optional<Quantile> q;
        if (alpha > 0.0) q = empirical_quantile(scores, alpha);
        const auto sets = candidate_sets_for(cal_probs, alpha, q);
        for (int i = 0; i < n; ++i) {
            const auto& set = sets[static_cast<std::size_t>(i)];
            const bool included = set.contains(cal_labels[static_cast<std::size_t>(i)]);
            costs[static_cast<std::size_t>(i)] = query_cost(num_classes, set.size(), included).bits;
        }
        const double total = canonical_total(costs);
        if (!have_best || total < best.total_cost.bits) {
            best.alpha_star = alpha;
            best.quantile = q;
            best.total_cost = {total};
            have_best = true;
        }
    }
    return best;
}

}  // namespace csq
