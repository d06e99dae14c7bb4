#pragma once

#include "csq/candidate_set.hpp"
#include "csq/cost.hpp"
#include "csq/rng.hpp"

namespace csq {

/// Uniform label noise: with probability epsilon the annotator perceives a
/// uniformly random wrong class and acts on it throughout the query.
struct NoiseModel {
    double epsilon = 0.0;
};

struct QueryOutcome {
    int returned_label = 0;
    CostBits cost;
    bool second_stage_used = false;
};

/// The class the annotator believes it sees. One perception per sample; the
/// same perceived label drives both query stages.
int perceive_label(int y_true, int num_classes, const NoiseModel& noise, RngStream& stream);

/// Answers a candidate set query with the perceived label. If the perceived
/// label is outside the set (and the set is not exhaustive), the annotator
/// takes the second stage over the remaining classes, even when the set
/// actually contains the true label.
QueryOutcome answer_query(int perceived, const CandidateSet& set, int num_classes);

}  // namespace csq
