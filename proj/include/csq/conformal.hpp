#pragma once

#include <optional>
#include <span>
#include <vector>

#include "csq/candidate_set.hpp"
#include "csq/cost.hpp"
#include "csq/prob_matrix.hpp"

namespace csq {

/// Nonconformity scores 1 - P(y_i | x_i), one per calibration sample.
struct ScoreSet {
    std::vector<double> values;
};

/// Empirical quantile of a score set together with the error rate it was
/// computed for. The value is always an element of the score set.
struct Quantile {
    double value = 0.0;
    double alpha = 0.0;
};

/// Sorted distinct error-rate options for the grid search. Always contains
/// 0, which stands for the exhaustive (conventional) set.
class AlphaGrid {
public:
    explicit AlphaGrid(std::vector<double> values);

    /// 0.00, 0.01, ..., 0.99.
    static AlphaGrid default_grid();

    const std::vector<double>& values() const { return values_; }

private:
    std::vector<double> values_;
};

/// Result of the per-round error-rate optimization.
struct AlphaChoice {
    double alpha_star = 0.0;
    std::optional<Quantile> quantile;  // empty when alpha_star == 0
    CostBits total_cost;               // summed query cost over the calibration set
};

/// score_i = 1 - probs[i][labels[i]].
ScoreSet conformal_scores(const ProbMatrix& probs, std::span<const int> labels);

/// Smallest score s with (1/n) * #{s' <= s} >= 1 - alpha, for alpha in (0,1).
Quantile empirical_quantile(const ScoreSet& scores, double alpha);

/// Classes with probability >= 1 - q.value (tested as score 1 - p <= q.value
/// for bit-consistency with the quantile), ordered by descending probability
/// then ascending id. An empty threshold set falls back to the top-1 class.
CandidateSet candidate_set(std::span<const double> prob_row, const Quantile& q);

/// Per-row candidate sets. alpha == 0 yields the full label space for every
/// row (no quantile needed); otherwise q must be supplied.
std::vector<CandidateSet> candidate_sets_for(const ProbMatrix& probs, double alpha,
                                             const std::optional<Quantile>& q);

/// Fraction of rows whose label is inside its set.
double inclusion_rate(std::span<const CandidateSet> sets, std::span<const int> labels);

/// Grid search for the error rate minimizing total annotation cost over the
/// calibration set, scoring each alpha with its own self-calibrated quantile
/// and the true per-sample membership. Ties resolve toward smaller alpha.
AlphaChoice optimize_alpha(const ProbMatrix& cal_probs, std::span<const int> cal_labels,
                           const AlphaGrid& grid, int num_classes);

}  // namespace csq
