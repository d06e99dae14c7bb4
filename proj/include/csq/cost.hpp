#pragma once

#include <cmath>
#include <span>
#include <stdexcept>

namespace csq {

/// Annotation effort in bits. Selecting one of m options costs log2(m).
struct CostBits {
    double bits = 0.0;
};

/// Cost of one candidate set query against a label space of L classes.
///
/// The annotator first picks among the k candidates plus "none of the above"
/// (k+1 options). If the label was not in the set, a second stage runs over
/// the remaining L-k classes. An exhaustive set (k == L) is the conventional
/// query: there is no second stage and no escape option, so the cost is
/// log2(L) independent of gt_included.
inline CostBits query_cost(int num_classes, int set_size, bool gt_included) {
    if (num_classes < 2) throw std::invalid_argument("query_cost: need at least 2 classes");
    if (set_size < 1 || set_size > num_classes)
        throw std::invalid_argument("query_cost: set size out of range");
    if (set_size == num_classes) return {std::log2(static_cast<double>(num_classes))};
    const double first = std::log2(static_cast<double>(set_size) + 1.0);
    if (gt_included) return {first};
    return {first + std::log2(static_cast<double>(num_classes - set_size))};
}

/// Expected query cost when the set misses the true label with probability
/// alpha: log2(k+1) + alpha * log2(L-k), or log2(L) for the exhaustive set.
inline CostBits expected_cost(int num_classes, int set_size, double alpha) {
    if (num_classes < 2) throw std::invalid_argument("expected_cost: need at least 2 classes");
    if (set_size < 1 || set_size > num_classes)
        throw std::invalid_argument("expected_cost: set size out of range");
    if (alpha < 0.0 || alpha >= 1.0) throw std::invalid_argument("expected_cost: alpha out of [0,1)");
    if (set_size == num_classes) return {std::log2(static_cast<double>(num_classes))};
    return {std::log2(static_cast<double>(set_size) + 1.0) +
            alpha * std::log2(static_cast<double>(num_classes - set_size))};
}

/// True iff a set of size k with miss rate alpha is strictly cheaper in
/// expectation than the conventional query: log2(k+1)/log2(L) < 1 - alpha.
inline bool csq_improvement_condition(int num_classes, int set_size, double alpha) {
    if (num_classes < 2) throw std::invalid_argument("improvement_condition: need at least 2 classes");
    if (set_size < 1 || set_size >= num_classes)
        throw std::invalid_argument("improvement_condition: set size out of range");
    if (alpha < 0.0 || alpha >= 1.0)
        throw std::invalid_argument("improvement_condition: alpha out of [0,1)");
    return std::log2(static_cast<double>(set_size) + 1.0) /
               std::log2(static_cast<double>(num_classes)) <
           1.0 - alpha;
}

/// Minimum top-k accuracy at which fixed-size-k sets always beat the
/// conventional query: log(k+1)/log(L).
inline double topk_accuracy_threshold(int num_classes, int set_size) {
    if (num_classes < 2) throw std::invalid_argument("topk_threshold: need at least 2 classes");
    if (set_size < 1 || set_size >= num_classes)
        throw std::invalid_argument("topk_threshold: set size out of range");
    return std::log(static_cast<double>(set_size) + 1.0) /
           std::log(static_cast<double>(num_classes));
}

/// Cumulative cost as a percentage of labeling all N samples conventionally.
inline double relative_cost_pct(CostBits total, int population, int num_classes) {
    if (population < 1) throw std::invalid_argument("relative_cost: population must be positive");
    if (num_classes < 2) throw std::invalid_argument("relative_cost: need at least 2 classes");
    return 100.0 * total.bits /
           (static_cast<double>(population) * std::log2(static_cast<double>(num_classes)));
}

/// Pearson correlation between log2(option count) and measured effort.
/// Quantifies how well observed annotation cost follows the logarithmic model.
inline double cost_model_fit(std::span<const double> option_counts,
                             std::span<const double> measured_bits) {
    if (option_counts.size() != measured_bits.size())
        throw std::invalid_argument("cost_model_fit: length mismatch");
    const std::size_t n = option_counts.size();
    if (n < 3) throw std::invalid_argument("cost_model_fit: need at least 3 points");

    double mean_x = 0.0, mean_y = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        if (option_counts[i] <= 0.0)
            throw std::invalid_argument("cost_model_fit: option counts must be positive");
        mean_x += std::log2(option_counts[i]);
        mean_y += measured_bits[i];
    }
    mean_x /= static_cast<double>(n);
    mean_y /= static_cast<double>(n);

    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = std::log2(option_counts[i]) - mean_x;
        const double dy = measured_bits[i] - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw std::invalid_argument("cost_model_fit: zero variance");
    return sxy / std::sqrt(sxx * syy);
}

}  // namespace csq
