#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "csq/acquisition.hpp"
#include "csq/annotator.hpp"
#include "csq/classifier.hpp"
#include "csq/conformal.hpp"
#include "csq/dataset.hpp"

namespace csq {

/// How the per-round annotation batch is queried.
struct QueryDesign {
    enum class Kind { csq, conventional, topk, oracle };
    Kind kind = Kind::csq;
    int k = 1;  // topk only
};

/// One row of the experiment report. Set-size and inclusion statistics cover
/// the design-annotated batch of the round; calibration queries count toward
/// cost only.
struct RoundMetrics {
    int round = 0;
    double accuracy = 0.0;
    double cumulative_cost_bits = 0.0;
    double relative_cost_pct = 0.0;
    double mean_set_size = 0.0;
    double gt_inclusion_rate = 0.0;
    double alpha_star = 0.0;
    int n_second_stage = 0;
};

struct EngineConfig {
    int rounds = 1;
    int budget = 1;
    int n_cal = 1;
    AlphaGrid alpha_grid = AlphaGrid::default_grid();
    AcquisitionConfig acquisition;
    QueryDesign design;
    NoiseModel noise;
    RngSeed seed;
    std::vector<double> external_scores;  // indexed by dataset id; external kinds only
    bool record_queries = false;          // keep per-query costs for audits
};

/// Carried between rounds: annotated data, remaining pool, current model and
/// the previous round's conformal state used to label the next calibration set.
struct RoundState {
    std::vector<int> labeled_ids;
    std::vector<int> labeled_labels;  // as annotated, possibly noisy
    std::vector<int> pool;            // ascending
    std::unique_ptr<ProbModel> model;
    std::optional<Quantile> prev_quantile;
    double prev_alpha = 0.0;
    double cumulative_cost_bits = 0.0;
    int round_index = 0;
};

/// Candidate sets for one annotation batch under the given design. The oracle
/// design builds the smallest probability-ranked prefix containing the true
/// label and therefore needs true labels.
std::vector<CandidateSet> build_query_sets(const QueryDesign& design, const ProbMatrix& probs,
                                           double alpha_star, const std::optional<Quantile>& q,
                                           std::span<const int> true_labels = {});

/// Multi-round active learning driver. Rounds run sequentially; the pool-wide
/// probability, entropy and set-construction maps inside a round are the
/// parallel kernels.
class ActiveLearningLoop {
public:
    ActiveLearningLoop(const Dataset& data, const IndexSplit& split, const Trainer& trainer,
                       EngineConfig cfg);

    /// Trains the initial model on the initial labeled set, charging the
    /// conventional query cost for every initial label.
    RoundMetrics initialize();

    /// Executes one acquisition + calibration + annotation + retrain round.
    RoundMetrics run_round();

    const RoundState& state() const { return state_; }
    const std::vector<double>& query_cost_log() const { return query_cost_log_; }

private:
    const Dataset& data_;
    const Trainer& trainer_;
    EngineConfig cfg_;
    std::vector<int> validation_;
    int cost_population_;  // everything except validation
    RoundState state_;
    std::vector<double> query_cost_log_;
    bool initialized_ = false;
};

/// Runs initialize plus cfg.rounds rounds and returns one metrics row per
/// round including round 0. Deterministic in the seed.
std::vector<RoundMetrics> run_experiment(const Dataset& data, const IndexSplit& split,
                                         const Trainer& trainer, const EngineConfig& cfg);

}  // namespace csq
