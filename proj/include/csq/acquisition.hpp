#pragma once

#include <span>
#include <string>
#include <vector>

#include "csq/candidate_set.hpp"
#include "csq/prob_matrix.hpp"
#include "csq/rng.hpp"

namespace csq {

/// One score per pool sample, aligned with the pool index order.
using ScoreVector = std::vector<double>;

enum class AcquisitionKind {
    random,
    entropy,
    external,
    cost_random,
    cost_entropy,
    cost_external,
};

struct AcquisitionConfig {
    AcquisitionKind kind = AcquisitionKind::entropy;
    double exponent = 0.3;  // d in the cost-efficient score
};

bool is_cost_kind(AcquisitionKind kind);
bool is_external_kind(AcquisitionKind kind);
AcquisitionKind acquisition_kind_from_name(const std::string& name);
std::string acquisition_kind_name(AcquisitionKind kind);

/// Shannon entropy in bits of one probability row; 0 log 0 counts as 0.
double entropy_score(std::span<const double> prob_row);

/// Informativeness per expected annotation bit:
/// (1 + g)^d / (log2(k+1) + alpha_star * log2(L-k)).
double cost_efficient_score(double base_score, int set_size, double alpha_star,
                            int num_classes, double exponent);

/// Scores every pool row. Cost variants divide the base score (entropy,
/// random draw, or externally supplied) by the expected cost of each sample's
/// candidate set under the shared alpha_star. The random stream must be keyed
/// per round by the caller so results are schedule-independent.
ScoreVector score_pool(const ProbMatrix& probs, std::span<const CandidateSet> sets,
                       const AcquisitionConfig& cfg, double alpha_star, int num_classes,
                       RngStream rng, std::span<const double> external_scores = {});

/// The budget highest-scoring pool ids, ties broken by ascending id; output
/// ordered by (descending score, ascending id).
std::vector<int> select_top_b(const ScoreVector& scores, std::span<const int> pool_ids, int budget);

}  // namespace csq
