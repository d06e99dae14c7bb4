#include "csq/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "csq/cost.hpp"
#include "csq/kernels.hpp"

namespace csq {

bool is_cost_kind(AcquisitionKind kind) {
    return kind == AcquisitionKind::cost_random || kind == AcquisitionKind::cost_entropy ||
           kind == AcquisitionKind::cost_external;
}

bool is_external_kind(AcquisitionKind kind) {
    return kind == AcquisitionKind::external || kind == AcquisitionKind::cost_external;
}

AcquisitionKind acquisition_kind_from_name(const std::string& name) {
    if (name == "random") return AcquisitionKind::random;
    if (name == "entropy") return AcquisitionKind::entropy;
    if (name == "external") return AcquisitionKind::external;
    if (name == "cost(random)") return AcquisitionKind::cost_random;
    if (name == "cost(entropy)") return AcquisitionKind::cost_entropy;
    if (name == "cost(external)") return AcquisitionKind::cost_external;
    throw std::invalid_argument("unknown acquisition kind '" + name + "'");
}

std::string acquisition_kind_name(AcquisitionKind kind) {
    switch (kind) {
        case AcquisitionKind::random: return "random";
        case AcquisitionKind::entropy: return "entropy";
        case AcquisitionKind::external: return "external";
        case AcquisitionKind::cost_random: return "cost(random)";
        case AcquisitionKind::cost_entropy: return "cost(entropy)";
        case AcquisitionKind::cost_external: return "cost(external)";
    }
    throw std::logic_error("unreachable");
}

double entropy_score(std::span<const double> prob_row) {
    double h = 0.0;
    for (double p : prob_row) {
        if (p > 0.0) h -= p * std::log2(p);
    }
    return h;
}

double cost_efficient_score(double base_score, int set_size, double alpha_star,
                            int num_classes, double exponent) {
    if (base_score < 0.0) throw std::invalid_argument("cost_efficient_score: base score must be >= 0");
    if (exponent <= 0.0) throw std::invalid_argument("cost_efficient_score: exponent must be positive");
    const double denom = expected_cost(num_classes, set_size, alpha_star).bits;
    return std::pow(1.0 + base_score, exponent) / denom;
}

ScoreVector score_pool(const ProbMatrix& probs, std::span<const CandidateSet> sets,
                       const AcquisitionConfig& cfg, double alpha_star, int num_classes,
                       RngStream rng, std::span<const double> external_scores) {
    const int n = probs.rows();
    ScoreVector base(static_cast<std::size_t>(n));

    switch (cfg.kind) {
        case AcquisitionKind::random:
        case AcquisitionKind::cost_random:
            for (int i = 0; i < n; ++i) base[static_cast<std::size_t>(i)] = rng.uniform01();
            break;
        case AcquisitionKind::entropy:
        case AcquisitionKind::cost_entropy:
            kernels::entropy_rows(probs, base);
            break;
        case AcquisitionKind::external:
        case AcquisitionKind::cost_external:
            if (external_scores.size() != static_cast<std::size_t>(n))
                throw std::invalid_argument("score_pool: external scores misaligned with pool");
            std::copy(external_scores.begin(), external_scores.end(), base.begin());
            break;
    }
    if (!is_cost_kind(cfg.kind)) return base;

    if (sets.size() != static_cast<std::size_t>(n))
        throw std::invalid_argument("score_pool: cost acquisition needs one candidate set per row");
    for (int i = 0; i < n; ++i)
        base[static_cast<std::size_t>(i)] =
            cost_efficient_score(base[static_cast<std::size_t>(i)], sets[static_cast<std::size_t>(i)].size(),
                                 alpha_star, num_classes, cfg.exponent);
    return base;
}

std::vector<int> select_top_b(const ScoreVector& scores, std::span<const int> pool_ids, int budget) {
    if (scores.size() != pool_ids.size())
        throw std::invalid_argument("select_top_b: scores and ids misaligned");
    if (budget < 0 || static_cast<std::size_t>(budget) > pool_ids.size())
        throw std::invalid_argument("select_top_b: budget exceeds pool");

    std::vector<std::size_t> order(pool_ids.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return pool_ids[a] < pool_ids[b];
    });

    std::vector<int> out;
    out.reserve(static_cast<std::size_t>(budget));
    for (int i = 0; i < budget; ++i) out.push_back(pool_ids[order[static_cast<std::size_t>(i)]]);
    return out;
}

}  // namespace csq
