#include "csq/engine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace csq {

std::vector<CandidateSet> build_query_sets(const QueryDesign& design, const ProbMatrix& probs,
                                           double alpha_star, const std::optional<Quantile>& q,
                                           std::span<const int> true_labels) {
    const int L = probs.cols();
    switch (design.kind) {
        case QueryDesign::Kind::csq:
            return candidate_sets_for(probs, alpha_star, q);
        case QueryDesign::Kind::conventional:
            return candidate_sets_for(probs, 0.0, std::nullopt);
        case QueryDesign::Kind::topk: {
            if (design.k < 1 || design.k > L)
                throw std::invalid_argument("build_query_sets: top-k size out of range");
            auto full = candidate_sets_for(probs, 0.0, std::nullopt);
            for (auto& set : full) set.classes.resize(static_cast<std::size_t>(design.k));
            return full;
        }
        case QueryDesign::Kind::oracle: {
            if (true_labels.size() != static_cast<std::size_t>(probs.rows()))
                throw std::invalid_argument("build_query_sets: oracle design needs true labels");
            auto full = candidate_sets_for(probs, 0.0, std::nullopt);
            for (std::size_t i = 0; i < full.size(); ++i) {
                auto& classes = full[i].classes;
                const auto pos = std::find(classes.begin(), classes.end(), true_labels[i]);
                classes.resize(static_cast<std::size_t>(pos - classes.begin()) + 1);
            }
            return full;
        }
    }
    throw std::logic_error("unreachable");
}

ActiveLearningLoop::ActiveLearningLoop(const Dataset& data, const IndexSplit& split,
                                       const Trainer& trainer, EngineConfig cfg)
    : data_(data), trainer_(trainer), cfg_(std::move(cfg)), validation_(split.validation) {
    if (split.initial_labeled.empty())
        throw std::invalid_argument("engine: initial labeled set is empty");
    if (validation_.empty())
        throw std::invalid_argument("engine: validation split is empty");
    if (cfg_.budget < 1) throw std::invalid_argument("engine: budget must be positive");
    if (cfg_.design.kind == QueryDesign::Kind::csq &&
        (cfg_.n_cal < 1 || cfg_.n_cal >= cfg_.budget))
        throw std::invalid_argument("engine: n_cal must satisfy 1 <= n_cal < budget");
    if (is_external_kind(cfg_.acquisition.kind) &&
        cfg_.external_scores.size() != static_cast<std::size_t>(data_.size()))
        throw std::invalid_argument("engine: external scores must cover every dataset id");

    cost_population_ = data_.size() - static_cast<int>(validation_.size());
    state_.labeled_ids = split.initial_labeled;
    state_.pool = split.pool;
}

RoundMetrics ActiveLearningLoop::initialize() {
    if (initialized_) throw std::logic_error("engine: already initialized");
    initialized_ = true;

    const int L = data_.num_classes();

    // Initial annotation is a conventional query per sample; the perceived
    // label is returned directly since the exhaustive set always contains it.
    RngStream noise_rng(cfg_.seed, "noise", 0);
    state_.labeled_labels.reserve(state_.labeled_ids.size());
    const double conventional_bits = std::log2(static_cast<double>(L));
    for (int id : state_.labeled_ids) {
        const int perceived = perceive_label(data_.label(id), L, cfg_.noise, noise_rng);
        state_.labeled_labels.push_back(perceived);
        state_.cumulative_cost_bits += conventional_bits;
        if (cfg_.record_queries) query_cost_log_.push_back(conventional_bits);
    }

    state_.model = trainer_.fit(data_, state_.labeled_ids, state_.labeled_labels);
    state_.prev_quantile.reset();
    state_.prev_alpha = 0.0;
    state_.round_index = 0;

    RoundMetrics m;
    m.round = 0;
    m.accuracy = accuracy(*state_.model, data_, validation_);
    m.cumulative_cost_bits = state_.cumulative_cost_bits;
    m.relative_cost_pct = relative_cost_pct({state_.cumulative_cost_bits}, cost_population_, L);
    m.mean_set_size = static_cast<double>(L);  // every class is a candidate before any calibration
    m.gt_inclusion_rate = 1.0;
    m.alpha_star = 0.0;
    m.n_second_stage = 0;
    return m;
}

RoundMetrics ActiveLearningLoop::run_round() {
    if (!initialized_) throw std::logic_error("engine: initialize first");
    const int L = data_.num_classes();
    const int B = cfg_.budget;
    const bool csq_design = cfg_.design.kind == QueryDesign::Kind::csq;
    if (static_cast<int>(state_.pool.size()) < B)
        throw std::invalid_argument("engine: budget exceeds remaining pool");

    const int round = state_.round_index + 1;
    const ProbMatrix pool_probs = state_.model->predict_proba(data_, state_.pool);

    // Sets implied by the previous round's error rate and quantile. They price
    // the pool for acquisition and annotate this round's calibration samples.
    std::vector<CandidateSet> prev_sets;
    const bool need_prev_sets = csq_design || is_cost_kind(cfg_.acquisition.kind);
    if (need_prev_sets)
        prev_sets = candidate_sets_for(pool_probs, state_.prev_alpha, state_.prev_quantile);

    std::vector<double> external;
    if (is_external_kind(cfg_.acquisition.kind)) {
        external.reserve(state_.pool.size());
        for (int id : state_.pool)
            external.push_back(cfg_.external_scores[static_cast<std::size_t>(id)]);
    }

    const ScoreVector scores =
        score_pool(pool_probs, prev_sets, cfg_.acquisition, state_.prev_alpha, L,
                   RngStream(cfg_.seed, "acq", static_cast<std::uint64_t>(round)), external);
    std::vector<int> selected = select_top_b(scores, state_.pool, B);
    std::sort(selected.begin(), selected.end());

    // One perception per selected sample, drawn in ascending id order so the
    // noise stream consumption does not depend on the query design.
    RngStream noise_rng(cfg_.seed, "noise", static_cast<std::uint64_t>(round));
    std::vector<int> perceived(selected.size());
    for (std::size_t i = 0; i < selected.size(); ++i)
        perceived[i] = perceive_label(data_.label(selected[i]), L, cfg_.noise, noise_rng);

    // Calibration split: a uniform subset of the selected batch.
    std::vector<int> cal_ids, batch_ids;
    if (csq_design) {
        std::vector<int> shuffled = selected;
        RngStream cal_rng(cfg_.seed, "cal", static_cast<std::uint64_t>(round));
        for (std::size_t i = shuffled.size() - 1; i > 0; --i) {
            const auto j = static_cast<std::size_t>(cal_rng.uniform_below(i + 1));
            std::swap(shuffled[i], shuffled[j]);
        }
        cal_ids.assign(shuffled.begin(), shuffled.begin() + cfg_.n_cal);
        batch_ids.assign(shuffled.begin() + cfg_.n_cal, shuffled.end());
        std::sort(cal_ids.begin(), cal_ids.end());
        std::sort(batch_ids.begin(), batch_ids.end());
    } else {
        batch_ids = selected;
    }

    const auto pool_pos = [&](int id) {
        const auto it = std::lower_bound(state_.pool.begin(), state_.pool.end(), id);
        return static_cast<int>(it - state_.pool.begin());
    };
    const auto perceived_of = [&](int id) {
        const auto it = std::lower_bound(selected.begin(), selected.end(), id);
        return perceived[static_cast<std::size_t>(it - selected.begin())];
    };

    double round_cost = 0.0;
    std::vector<int> cal_labels;

    // Calibration samples are labeled with the previous round's sets; at
    // round one that degenerates to the conventional query.
    for (int id : cal_ids) {
        const auto& set = prev_sets[static_cast<std::size_t>(pool_pos(id))];
        const QueryOutcome out = answer_query(perceived_of(id), set, L);
        cal_labels.push_back(out.returned_label);
        round_cost += out.cost.bits;
        if (cfg_.record_queries) query_cost_log_.push_back(out.cost.bits);
    }

    // Optimize the error rate on the freshly annotated calibration set.
    double alpha_star = 0.0;
    std::optional<Quantile> q_star;
    if (csq_design) {
        std::vector<int> cal_pos(cal_ids.size());
        for (std::size_t i = 0; i < cal_ids.size(); ++i) cal_pos[i] = pool_pos(cal_ids[i]);
        const ProbMatrix cal_probs = pool_probs.gather(cal_pos);
        const AlphaChoice choice = optimize_alpha(cal_probs, cal_labels, cfg_.alpha_grid, L);
        alpha_star = choice.alpha_star;
        q_star = choice.quantile;
    }

    // Annotate the remaining batch with the configured design.
    std::vector<int> batch_pos(batch_ids.size());
    for (std::size_t i = 0; i < batch_ids.size(); ++i) batch_pos[i] = pool_pos(batch_ids[i]);
    const ProbMatrix batch_probs = pool_probs.gather(batch_pos);

    std::vector<int> batch_true;
    if (cfg_.design.kind == QueryDesign::Kind::oracle) {
        batch_true.reserve(batch_ids.size());
        for (int id : batch_ids) batch_true.push_back(data_.label(id));
    }
    const std::vector<CandidateSet> batch_sets =
        build_query_sets(cfg_.design, batch_probs, alpha_star, q_star, batch_true);

    int n_second_stage = 0;
    std::vector<int> batch_labels;
    for (std::size_t i = 0; i < batch_ids.size(); ++i) {
        const QueryOutcome out = answer_query(perceived_of(batch_ids[i]), batch_sets[i], L);
        batch_labels.push_back(out.returned_label);
        round_cost += out.cost.bits;
        if (out.second_stage_used) ++n_second_stage;
        if (cfg_.record_queries) query_cost_log_.push_back(out.cost.bits);
    }

    // Calibration samples join the training data alongside the batch. The
    // round's annotations are appended in ascending id order so the labeled
    // sequence (and with it mini-batch composition) does not depend on the
    // calibration split or the query design.
    {
        std::size_t ci = 0, bi = 0;
        while (ci < cal_ids.size() || bi < batch_ids.size()) {
            const bool take_cal = bi == batch_ids.size() ||
                                  (ci < cal_ids.size() && cal_ids[ci] < batch_ids[bi]);
            if (take_cal) {
                state_.labeled_ids.push_back(cal_ids[ci]);
                state_.labeled_labels.push_back(cal_labels[ci]);
                ++ci;
            } else {
                state_.labeled_ids.push_back(batch_ids[bi]);
                state_.labeled_labels.push_back(batch_labels[bi]);
                ++bi;
            }
        }
    }
    std::vector<int> remaining;
    remaining.reserve(state_.pool.size() - selected.size());
    std::set_difference(state_.pool.begin(), state_.pool.end(), selected.begin(), selected.end(),
                        std::back_inserter(remaining));
    state_.pool = std::move(remaining);

    state_.cumulative_cost_bits += round_cost;
    state_.model = trainer_.fit(data_, state_.labeled_ids, state_.labeled_labels);
    state_.prev_alpha = alpha_star;
    state_.prev_quantile = q_star;
    state_.round_index = round;

    RoundMetrics m;
    m.round = round;
    m.accuracy = accuracy(*state_.model, data_, validation_);
    m.cumulative_cost_bits = state_.cumulative_cost_bits;
    m.relative_cost_pct = relative_cost_pct({state_.cumulative_cost_bits}, cost_population_, L);
    std::size_t size_sum = 0;
    for (const auto& set : batch_sets) size_sum += static_cast<std::size_t>(set.size());
    m.mean_set_size = static_cast<double>(size_sum) / static_cast<double>(batch_sets.size());
    std::vector<int> true_labels;
    true_labels.reserve(batch_ids.size());
    for (int id : batch_ids) true_labels.push_back(data_.label(id));
    m.gt_inclusion_rate = inclusion_rate(batch_sets, true_labels);
    m.alpha_star = alpha_star;
    m.n_second_stage = n_second_stage;
    return m;
}

std::vector<RoundMetrics> run_experiment(const Dataset& data, const IndexSplit& split,
                                         const Trainer& trainer, const EngineConfig& cfg) {
    if (cfg.rounds < 0) throw std::invalid_argument("run_experiment: rounds must be >= 0");
    ActiveLearningLoop loop(data, split, trainer, cfg);
    std::vector<RoundMetrics> all;
    all.reserve(static_cast<std::size_t>(cfg.rounds) + 1);
    all.push_back(loop.initialize());
    for (int r = 0; r < cfg.rounds; ++r) all.push_back(loop.run_round());
    return all;
}

}  // namespace csq
