// Command line driver: run one experiment, sweep a list of variants, fit the
// logarithmic cost model to measured annotation effort, or write a synthetic
// blob dataset.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "csq/config.hpp"
#include "csq/report.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 2;
constexpr int kExitRuntimeError = 3;

csq::MetricsReport execute(const csq::ExperimentConfig& cfg) {
    csq::PreparedExperiment prep = csq::prepare_experiment(cfg);
    csq::SoftmaxTrainer trainer(prep.train);
    csq::MetricsReport report;
    report.config = cfg;
    report.rounds = csq::run_experiment(prep.data, prep.split, trainer, prep.engine);
    return report;
}

void write_report(const csq::MetricsReport& report, const fs::path& dir,
                  const std::string& stem) {
    fs::create_directories(dir);
    csq::emit_metrics_csv(report, (dir / (stem + ".csv")).string());
    csq::emit_config_echo(report, (dir / (stem + ".config.json")).string());
}

void print_rounds(const std::vector<csq::RoundMetrics>& rounds) {
    for (const auto& m : rounds) {
        std::printf("round %d  acc %.4f  cost %.1f bits  rel %.2f%%  mean|Y| %.2f  incl %.3f  alpha* %.2f\n",
                    m.round, m.accuracy, m.cumulative_cost_bits, m.relative_cost_pct,
                    m.mean_set_size, m.gt_inclusion_rate, m.alpha_star);
    }
}

int cmd_run(const std::string& config_path, const std::optional<std::string>& out_dir,
            const std::optional<std::uint64_t>& seed) {
    csq::ExperimentConfig cfg = csq::parse_config(config_path);
    if (seed) cfg.seed = *seed;
    if (out_dir) cfg.output_dir = *out_dir;
    const csq::MetricsReport report = execute(cfg);
    write_report(report, cfg.output_dir, "metrics");
    print_rounds(report.rounds);
    std::printf("wrote %s\n", (fs::path(cfg.output_dir) / "metrics.csv").string().c_str());
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::optional<std::string>& out_dir,
              const std::optional<std::uint64_t>& seed) {
    std::ifstream in(config_path);
    if (!in) throw csq::ConfigError("config: cannot open " + config_path);
    nlohmann::ordered_json doc;
    try {
        in >> doc;
    } catch (const std::exception& e) {
        throw csq::ConfigError("config: invalid JSON: " + std::string(e.what()));
    }
    if (!doc.is_object() || !doc.contains("base") || !doc.contains("runs"))
        throw csq::ConfigError("sweep config: expected {\"base\": {...}, \"runs\": [...]}");

    const auto& runs = doc.at("runs");
    if (!runs.is_array() || runs.empty())
        throw csq::ConfigError("sweep config: 'runs' must be a non-empty array");

    for (const auto& overrides : runs) {
        if (!overrides.is_object() || !overrides.contains("name"))
            throw csq::ConfigError("sweep config: every run needs a 'name'");
        nlohmann::ordered_json merged = doc.at("base");
        std::string name;
        for (const auto& [key, value] : overrides.items()) {
            if (key == "name") {
                name = value.get<std::string>();
            } else {
                merged[key] = value;
            }
        }
        csq::ExperimentConfig cfg = csq::parse_config_json(merged.dump());
        if (seed) cfg.seed = *seed;
        if (out_dir) cfg.output_dir = *out_dir;
        const csq::MetricsReport report = execute(cfg);
        write_report(report, cfg.output_dir, name);
        const auto& last = report.rounds.back();
        std::printf("%-16s final acc %.4f  rel cost %.2f%%\n", name.c_str(), last.accuracy,
                    last.relative_cost_pct);
    }
    return kExitOk;
}

int cmd_costfit(const std::string& input_path) {
    std::ifstream in(input_path);
    if (!in) throw std::runtime_error("cannot open " + input_path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("cost-fit file is empty");
    std::vector<double> options, bits;
    int row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++row;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("cost-fit file: malformed row " + std::to_string(row));
        try {
            options.push_back(std::stod(line.substr(0, comma)));
            bits.push_back(std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw std::runtime_error("cost-fit file: malformed row " + std::to_string(row));
        }
    }
    const double corr = csq::cost_model_fit(options, bits);
    std::printf("points=%zu\npearson_correlation=%.6f\n", options.size(), corr);
    return kExitOk;
}

int cmd_synth(const std::string& out_path, int classes, const std::string& per_class, int dims,
              double spread, std::uint64_t seed) {
    std::vector<int> counts;
    std::stringstream ss(per_class);
    std::string tok;
    while (std::getline(ss, tok, ',')) counts.push_back(std::stoi(tok));
    if (counts.size() == 1 && classes > 0)
        counts.assign(static_cast<std::size_t>(classes), counts.front());
    const csq::Dataset data = csq::synth_blobs(counts, dims, spread, csq::RngSeed{seed});
    csq::save_dataset(data, out_path);
    std::printf("wrote %s (n=%d, d=%d, L=%d)\n", out_path.c_str(), data.size(), data.dim(),
                data.num_classes());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cost-efficient active learning with candidate set queries"};
    app.require_subcommand(1);

    std::string config_path, input_path, out_path, per_class = "100";
    std::optional<std::string> out_dir;
    std::optional<std::uint64_t> seed_override;
    int classes = 0, dims = 2;
    double spread = 1.0;
    std::uint64_t synth_seed = 0;

    auto* run = app.add_subcommand("run", "Run one experiment from a JSON config");
    run->add_option("--config", config_path, "Experiment config path")->required();
    run->add_option("--out", out_dir, "Output directory (overrides config)");
    run->add_option("--seed", seed_override, "Seed (overrides config)");

    auto* sweep = app.add_subcommand("sweep", "Run a list of config variants sharing a base");
    sweep->add_option("--config", config_path, "Sweep config path")->required();
    sweep->add_option("--out", out_dir, "Output directory (overrides config)");
    sweep->add_option("--seed", seed_override, "Seed (overrides config)");

    auto* costfit = app.add_subcommand("costfit", "Correlate measured effort with log2(options)");
    costfit->add_option("--input", input_path, "CSV with header options,bits")->required();

    auto* synth = app.add_subcommand("synth", "Write a Gaussian blob dataset");
    synth->add_option("--out", out_path, "Output CSV path")->required();
    synth->add_option("--classes", classes, "Number of classes");
    synth->add_option("--per-class", per_class, "Samples per class (int or comma list)");
    synth->add_option("--dims", dims, "Feature dimensions");
    synth->add_option("--spread", spread, "Per-class standard deviation");
    synth->add_option("--seed", synth_seed, "Generator seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, out_dir, seed_override);
        if (sweep->parsed()) return cmd_sweep(config_path, out_dir, seed_override);
        if (costfit->parsed()) return cmd_costfit(input_path);
        if (synth->parsed()) return cmd_synth(out_path, classes, per_class, dims, spread, synth_seed);
    } catch (const csq::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntimeError;
    }
    return kExitOk;
}
