#include "csq/report.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace csq {

std::string metrics_csv(const MetricsReport& report) {
    if (report.rounds.size() != static_cast<std::size_t>(report.config.rounds) + 1)
        throw std::logic_error("metrics_csv: expected one row per round including round 0");
    std::string out = kMetricsCsvHeader;
    out += '\n';
    char buf[256];
    for (const auto& m : report.rounds) {
        std::snprintf(buf, sizeof(buf), "%d,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f,%d\n", m.round,
                      m.accuracy, m.cumulative_cost_bits, m.relative_cost_pct, m.mean_set_size,
                      m.gt_inclusion_rate, m.alpha_star, m.n_second_stage);
        out += buf;
    }
    return out;
}

void emit_metrics_csv(const MetricsReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << metrics_csv(report);
    if (!out) throw std::runtime_error("write failed for " + path);
}

void emit_config_echo(const MetricsReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << config_echo_json(report.config, report.version);
    if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace csq
