#pragma once

#include <string>
#include <vector>

#include "csq/config.hpp"
#include "csq/engine.hpp"

namespace csq {

inline constexpr const char* kArtifactVersion = "0.1.0";
inline constexpr const char* kMetricsCsvHeader =
    "round,accuracy,cum_cost_bits,relative_cost_pct,mean_set_size,"
    "gt_inclusion_rate,alpha_star,n_second_stage";

/// Per-round metrics plus the fully materialized config that produced them.
struct MetricsReport {
    ExperimentConfig config;
    std::vector<RoundMetrics> rounds;  // rounds.size() == R + 1 (round 0 first)
    std::string version = kArtifactVersion;
};

/// Fixed-schema CSV, reals with six decimals, one row per round. Identical
/// runs serialize to byte-identical files.
std::string metrics_csv(const MetricsReport& report);
void emit_metrics_csv(const MetricsReport& report, const std::string& path);

/// The config echo sidecar (JSON, includes the artifact version).
void emit_config_echo(const MetricsReport& report, const std::string& path);

}  // namespace csq
