#include "csq/annotator.hpp"

#include <stdexcept>

namespace csq {

int perceive_label(int y_true, int num_classes, const NoiseModel& noise, RngStream& stream) {
    if (y_true < 0 || y_true >= num_classes)
        throw std::invalid_argument("perceive_label: class id out of range");
    if (noise.epsilon < 0.0 || noise.epsilon >= 1.0)
        throw std::invalid_argument("perceive_label: epsilon out of [0,1)");
    const double u = stream.uniform01();
    if (u >= noise.epsilon) return y_true;
    const auto other = static_cast<int>(stream.uniform_below(static_cast<std::uint64_t>(num_classes) - 1));
    return other >= y_true ? other + 1 : other;
}

QueryOutcome answer_query(int perceived, const CandidateSet& set, int num_classes) {
    if (set.size() < 1) throw std::invalid_argument("answer_query: empty candidate set");
    if (set.size() > num_classes) throw std::invalid_argument("answer_query: set larger than label space");
    const bool included = set.contains(perceived);
    QueryOutcome out;
    out.returned_label = perceived;
    out.second_stage_used = !included && set.size() < num_classes;
    out.cost = query_cost(num_classes, set.size(), included);
    return out;
}

}  // namespace csq
