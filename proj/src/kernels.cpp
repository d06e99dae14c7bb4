#include "csq/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace csq::kernels {

namespace {

void softmax_predict_one(const double* x, int dim, const double* weights, const double* bias,
                         const double* feat_mean, const double* feat_inv_std, int num_classes,
                         std::span<double> out) {
    double max_logit = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < num_classes; ++c) {
        double z = bias[c];
        const double* w = weights + static_cast<std::size_t>(c) * dim;
        for (int j = 0; j < dim; ++j) z += w[j] * ((x[j] - feat_mean[j]) * feat_inv_std[j]);
        out[static_cast<std::size_t>(c)] = z;
        max_logit = std::max(max_logit, z);
    }
    double sum = 0.0;
    for (int c = 0; c < num_classes; ++c) {
        const double e = std::exp(out[static_cast<std::size_t>(c)] - max_logit);
        out[static_cast<std::size_t>(c)] = e;
        sum += e;
    }
    const double inv = 1.0 / sum;
    for (int c = 0; c < num_classes; ++c) out[static_cast<std::size_t>(c)] *= inv;
}

double entropy_one(std::span<const double> row) {
    double h = 0.0;
    for (double p : row) {
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

CandidateSet threshold_set_one(std::span<const double> row, double quantile) {
    // Membership is tested in score space, 1 - p <= quantile, which is the
    // same predicate as p >= 1 - quantile but bit-consistent with how the
    // quantile itself was computed from scores.
    const int L = static_cast<int>(row.size());
    std::vector<int> classes;
    for (int c = 0; c < L; ++c) {
        if (1.0 - row[static_cast<std::size_t>(c)] <= quantile) classes.push_back(c);
    }
    if (classes.empty()) {
        int best = 0;
        for (int c = 1; c < L; ++c) {
            if (row[static_cast<std::size_t>(c)] > row[static_cast<std::size_t>(best)]) best = c;
        }
        classes.push_back(best);
    } else {
        std::sort(classes.begin(), classes.end(), [&](int a, int b) {
            const double pa = row[static_cast<std::size_t>(a)];
            const double pb = row[static_cast<std::size_t>(b)];
            if (pa != pb) return pa > pb;
            return a < b;
        });
    }
    return CandidateSet{std::move(classes)};
}

}  // namespace

void softmax_predict_rows_serial(const double* features, int dim, std::span<const int> row_ids,
                                 const double* weights, const double* bias,
                                 const double* feat_mean, const double* feat_inv_std,
                                 int num_classes, ProbMatrix& out) {
    const int n = static_cast<int>(row_ids.size());
    for (int i = 0; i < n; ++i) {
        const double* x = features + static_cast<std::size_t>(row_ids[static_cast<std::size_t>(i)]) * dim;
        softmax_predict_one(x, dim, weights, bias, feat_mean, feat_inv_std, num_classes, out.row(i));
    }
}

void softmax_predict_rows(const double* features, int dim, std::span<const int> row_ids,
                          const double* weights, const double* bias,
                          const double* feat_mean, const double* feat_inv_std,
                          int num_classes, ProbMatrix& out) {
    const int n = static_cast<int>(row_ids.size());
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        const double* x = features + static_cast<std::size_t>(row_ids[static_cast<std::size_t>(i)]) * dim;
        softmax_predict_one(x, dim, weights, bias, feat_mean, feat_inv_std, num_classes, out.row(i));
    }
}

void entropy_rows_serial(const ProbMatrix& probs, std::span<double> out) {
    for (int i = 0; i < probs.rows(); ++i) out[static_cast<std::size_t>(i)] = entropy_one(probs.row(i));
}

void entropy_rows(const ProbMatrix& probs, std::span<double> out) {
    const int n = probs.rows();
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = entropy_one(probs.row(i));
}

std::vector<CandidateSet> threshold_sets_serial(const ProbMatrix& probs, double quantile) {
    std::vector<CandidateSet> sets(static_cast<std::size_t>(probs.rows()));
    for (int i = 0; i < probs.rows(); ++i)
        sets[static_cast<std::size_t>(i)] = threshold_set_one(probs.row(i), quantile);
    return sets;
}

std::vector<CandidateSet> threshold_sets(const ProbMatrix& probs, double quantile) {
    const int n = probs.rows();
    std::vector<CandidateSet> sets(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i)
        sets[static_cast<std::size_t>(i)] = threshold_set_one(probs.row(i), quantile);
    return sets;
}

}  // namespace csq::kernels
