#pragma once

#include <span>
#include <vector>

#include "csq/candidate_set.hpp"
#include "csq/prob_matrix.hpp"

namespace csq::kernels {

// Row-parallel maps over sample batches. Every row is computed independently
// with the same scalar code path, so the OpenMP versions produce bit-identical
// output to their serial references; the references stay in the build as the
// test oracle and benchmark baseline.

/// Standardize each selected feature row, apply the affine map (weights
/// row-major L x d, one bias per class) and write softmax probabilities.
void softmax_predict_rows_serial(const double* features, int dim, std::span<const int> row_ids,
                                 const double* weights, const double* bias,
                                 const double* feat_mean, const double* feat_inv_std,
                                 int num_classes, ProbMatrix& out);
void softmax_predict_rows(const double* features, int dim, std::span<const int> row_ids,
                          const double* weights, const double* bias,
                          const double* feat_mean, const double* feat_inv_std,
                          int num_classes, ProbMatrix& out);

/// Shannon entropy in bits for each probability row.
void entropy_rows_serial(const ProbMatrix& probs, std::span<double> out);
void entropy_rows(const ProbMatrix& probs, std::span<double> out);

/// Per-row candidate set: classes whose nonconformity score 1 - p stays
/// within the quantile (equivalently p >= 1 - quantile), ordered by
/// descending probability then ascending id; an empty set falls back to the
/// top-1 class.
std::vector<CandidateSet> threshold_sets_serial(const ProbMatrix& probs, double quantile);
std::vector<CandidateSet> threshold_sets(const ProbMatrix& probs, double quantile);

}  // namespace csq::kernels
