#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "csq/engine.hpp"

namespace csq {

/// Raised for invalid or out-of-range configuration; the CLI maps it to its
/// own exit code, distinct from runtime failures.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Synthetic dataset request embedded in a config instead of a CSV path.
struct BlobSpec {
    std::vector<int> per_class_counts;
    int dim = 2;
    double spread = 1.0;
    std::optional<std::uint64_t> seed;  // defaults to the run seed
};

/// Full description of one experiment run, as parsed from JSON. Defaults are
/// materialized at parse time so the echoed config reproduces the run.
struct ExperimentConfig {
    std::string dataset_path;           // empty when blob is set
    std::optional<BlobSpec> blob;
    int rounds = 1;
    int budget = 1;
    int n_cal = 0;                      // 0 = derive min(budget/12, 500)
    int init_size = 0;                  // 0 = budget
    int val_size = 0;                   // 0 = n/6
    std::vector<double> alpha_grid;     // empty = default 0.00..0.99
    std::string acquisition = "entropy";
    double acquisition_d = 0.3;
    std::string scores_file;            // external kinds only
    std::string design = "csq";
    int topk = 1;
    double noise = 0.0;
    TrainConfig train;
    std::uint64_t seed = 0;
    std::string output_dir = ".";
};

ExperimentConfig parse_config(const std::string& path);
ExperimentConfig parse_config_json(const std::string& text);

/// The config with every default filled in, as a JSON document. Feeding this
/// back through parse_config reproduces the run byte for byte.
std::string config_echo_json(const ExperimentConfig& cfg, const std::string& artifact_version);

/// Materializes the dataset (load CSV or synthesize blobs), the index split
/// and the engine-level config.
struct PreparedExperiment {
    Dataset data;
    IndexSplit split;
    TrainConfig train;
    EngineConfig engine;
};
PreparedExperiment prepare_experiment(const ExperimentConfig& cfg);

/// pool_id,score rows for externally supplied acquisition scores.
std::vector<std::pair<int, double>> load_score_file(const std::string& path);

}  // namespace csq
