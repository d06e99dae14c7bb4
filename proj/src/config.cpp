#include "csq/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace csq {

namespace {

using nlohmann::ordered_json;

void reject_unknown(const ordered_json& obj, const std::set<std::string>& known,
                    const std::string& where) {
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        if (!known.contains(key))
            throw ConfigError(where + ": unknown field '" + key + "'");
    }
}

int require_int(const ordered_json& obj, const std::string& key, int fallback, bool required,
                const std::string& where) {
    if (!obj.contains(key)) {
        if (required) throw ConfigError(where + ": missing required field '" + key + "'");
        return fallback;
    }
    const auto& v = obj.at(key);
    if (!v.is_number_integer())
        throw ConfigError(where + "." + key + ": expected an integer");
    return v.get<int>();
}

double require_double(const ordered_json& obj, const std::string& key, double fallback,
                      const std::string& where) {
    if (!obj.contains(key)) return fallback;
    const auto& v = obj.at(key);
    if (!v.is_number()) throw ConfigError(where + "." + key + ": expected a number");
    return v.get<double>();
}

BlobSpec parse_blob(const ordered_json& obj) {
    reject_unknown(obj, {"type", "n_per_class", "classes", "dims", "spread", "seed"}, "dataset");
    BlobSpec blob;
    const int dims = require_int(obj, "dims", 2, false, "dataset");
    if (dims < 1) throw ConfigError("dataset.dims: must be positive");
    blob.dim = dims;
    blob.spread = require_double(obj, "spread", 1.0, "dataset");
    if (blob.spread < 0.0) throw ConfigError("dataset.spread: must be non-negative");
    if (obj.contains("seed")) {
        if (!obj.at("seed").is_number_unsigned())
            throw ConfigError("dataset.seed: expected an unsigned integer");
        blob.seed = obj.at("seed").get<std::uint64_t>();
    }

    if (!obj.contains("n_per_class"))
        throw ConfigError("dataset: blob spec needs 'n_per_class'");
    const auto& npc = obj.at("n_per_class");
    if (npc.is_array()) {
        for (const auto& v : npc) {
            if (!v.is_number_integer() || v.get<int>() < 1)
                throw ConfigError("dataset.n_per_class: entries must be positive integers");
            blob.per_class_counts.push_back(v.get<int>());
        }
        if (obj.contains("classes") &&
            obj.at("classes").get<int>() != static_cast<int>(blob.per_class_counts.size()))
            throw ConfigError("dataset.classes: contradicts n_per_class list length");
    } else if (npc.is_number_integer()) {
        const int per = npc.get<int>();
        if (per < 1) throw ConfigError("dataset.n_per_class: must be positive");
        const int classes = require_int(obj, "classes", 0, true, "dataset");
        if (classes < 2) throw ConfigError("dataset.classes: need at least 2");
        blob.per_class_counts.assign(static_cast<std::size_t>(classes), per);
    } else {
        throw ConfigError("dataset.n_per_class: expected integer or array");
    }
    if (blob.per_class_counts.size() < 2)
        throw ConfigError("dataset: need at least 2 classes");
    return blob;
}

ExperimentConfig parse_document(const ordered_json& doc) {
    if (!doc.is_object()) throw ConfigError("config: expected a JSON object");
    reject_unknown(doc,
                   {"dataset", "rounds", "budget", "n_cal", "init_size", "val_size",
                    "alpha_grid", "acquisition", "design", "noise", "train", "seed",
                    "output_dir", "artifact_version"},
                   "config");

    ExperimentConfig cfg;

    if (!doc.contains("dataset")) throw ConfigError("config: missing required field 'dataset'");
    const auto& ds = doc.at("dataset");
    if (ds.is_string()) {
        cfg.dataset_path = ds.get<std::string>();
    } else if (ds.is_object()) {
        if (ds.contains("type") && ds.at("type").get<std::string>() != "blobs")
            throw ConfigError("dataset.type: only 'blobs' is supported");
        cfg.blob = parse_blob(ds);
    } else {
        throw ConfigError("dataset: expected a path or a blob spec object");
    }

    cfg.rounds = require_int(doc, "rounds", 0, true, "config");
    if (cfg.rounds < 0) throw ConfigError("rounds: must be >= 0");
    cfg.budget = require_int(doc, "budget", 0, true, "config");
    if (cfg.budget < 1) throw ConfigError("budget: must be positive");

    if (!doc.contains("seed")) throw ConfigError("config: missing required field 'seed'");
    if (!doc.at("seed").is_number_unsigned())
        throw ConfigError("seed: expected an unsigned integer");
    cfg.seed = doc.at("seed").get<std::uint64_t>();

    cfg.n_cal = require_int(doc, "n_cal", 0, false, "config");
    if (doc.contains("n_cal") && cfg.n_cal < 1) throw ConfigError("n_cal: must be positive");
    cfg.init_size = require_int(doc, "init_size", 0, false, "config");
    if (doc.contains("init_size") && cfg.init_size < 1)
        throw ConfigError("init_size: must be positive");
    cfg.val_size = require_int(doc, "val_size", 0, false, "config");
    if (doc.contains("val_size") && cfg.val_size < 1)
        throw ConfigError("val_size: must be positive");

    if (doc.contains("alpha_grid")) {
        const auto& grid = doc.at("alpha_grid");
        if (!grid.is_array() || grid.empty())
            throw ConfigError("alpha_grid: expected a non-empty array");
        bool has_zero = false;
        for (const auto& v : grid) {
            if (!v.is_number()) throw ConfigError("alpha_grid: entries must be numbers");
            const double a = v.get<double>();
            if (a < 0.0 || a >= 1.0) throw ConfigError("alpha_grid: values must lie in [0,1)");
            if (a == 0.0) has_zero = true;
            cfg.alpha_grid.push_back(a);
        }
        if (!has_zero) throw ConfigError("alpha_grid: grid must contain 0");
    }

    if (doc.contains("acquisition")) {
        const auto& acq = doc.at("acquisition");
        if (acq.is_string()) {
            cfg.acquisition = acq.get<std::string>();
        } else if (acq.is_object()) {
            reject_unknown(acq, {"kind", "d", "scores_file"}, "acquisition");
            cfg.acquisition = acq.contains("kind") ? acq.at("kind").get<std::string>() : "entropy";
            cfg.acquisition_d = require_double(acq, "d", 0.3, "acquisition");
            if (cfg.acquisition_d <= 0.0) throw ConfigError("acquisition.d: must be positive");
            if (acq.contains("scores_file"))
                cfg.scores_file = acq.at("scores_file").get<std::string>();
        } else {
            throw ConfigError("acquisition: expected a kind name or object");
        }
        acquisition_kind_from_name(cfg.acquisition);  // validates the name
    }

    if (doc.contains("design")) {
        const auto& design = doc.at("design");
        if (design.is_string()) {
            cfg.design = design.get<std::string>();
            if (cfg.design != "csq" && cfg.design != "conventional" && cfg.design != "oracle")
                throw ConfigError("design: expected csq, conventional, oracle or {\"topk\": k}");
        } else if (design.is_object()) {
            reject_unknown(design, {"topk"}, "design");
            cfg.design = "topk";
            cfg.topk = require_int(design, "topk", 0, true, "design");
            if (cfg.topk < 1) throw ConfigError("design.topk: must be positive");
        } else {
            throw ConfigError("design: expected a name or {\"topk\": k}");
        }
    }

    cfg.noise = require_double(doc, "noise", 0.0, "config");
    if (cfg.noise < 0.0 || cfg.noise >= 1.0) throw ConfigError("noise: must lie in [0,1)");

    if (doc.contains("train")) {
        const auto& tr = doc.at("train");
        if (!tr.is_object()) throw ConfigError("train: expected an object");
        reject_unknown(tr, {"epochs", "batch_size", "learning_rate", "l2_decay"}, "train");
        cfg.train.epochs = require_int(tr, "epochs", cfg.train.epochs, false, "train");
        if (cfg.train.epochs < 0) throw ConfigError("train.epochs: must be >= 0");
        cfg.train.batch_size = require_int(tr, "batch_size", cfg.train.batch_size, false, "train");
        if (cfg.train.batch_size < 1) throw ConfigError("train.batch_size: must be positive");
        cfg.train.learning_rate =
            require_double(tr, "learning_rate", cfg.train.learning_rate, "train");
        if (cfg.train.learning_rate <= 0.0)
            throw ConfigError("train.learning_rate: must be positive");
        cfg.train.l2_decay = require_double(tr, "l2_decay", cfg.train.l2_decay, "train");
        if (cfg.train.l2_decay < 0.0) throw ConfigError("train.l2_decay: must be >= 0");
    }

    if (doc.contains("output_dir")) cfg.output_dir = doc.at("output_dir").get<std::string>();
    return cfg;
}

}  // namespace

ExperimentConfig parse_config_json(const std::string& text) {
    ordered_json doc;
    try {
        doc = ordered_json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError("config: invalid JSON: " + std::string(e.what()));
    }
    return parse_document(doc);
}

ExperimentConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_json(buf.str());
}

std::string config_echo_json(const ExperimentConfig& cfg, const std::string& artifact_version) {
    ordered_json doc;
    doc["artifact_version"] = artifact_version;
    if (cfg.blob) {
        ordered_json ds;
        ds["type"] = "blobs";
        ds["n_per_class"] = cfg.blob->per_class_counts;
        ds["dims"] = cfg.blob->dim;
        ds["spread"] = cfg.blob->spread;
        ds["seed"] = cfg.blob->seed.value_or(cfg.seed);
        doc["dataset"] = ds;
    } else {
        doc["dataset"] = cfg.dataset_path;
    }
    doc["rounds"] = cfg.rounds;
    doc["budget"] = cfg.budget;
    doc["seed"] = cfg.seed;
    if (cfg.n_cal > 0) doc["n_cal"] = cfg.n_cal;
    if (cfg.init_size > 0) doc["init_size"] = cfg.init_size;
    if (cfg.val_size > 0) doc["val_size"] = cfg.val_size;
    doc["alpha_grid"] = cfg.alpha_grid.empty()
                            ? AlphaGrid::default_grid().values()
                            : AlphaGrid(cfg.alpha_grid).values();
    ordered_json acq;
    acq["kind"] = cfg.acquisition;
    acq["d"] = cfg.acquisition_d;
    if (!cfg.scores_file.empty()) acq["scores_file"] = cfg.scores_file;
    doc["acquisition"] = acq;
    if (cfg.design == "topk") {
        doc["design"] = ordered_json{{"topk", cfg.topk}};
    } else {
        doc["design"] = cfg.design;
    }
    doc["noise"] = cfg.noise;
    ordered_json train;
    train["epochs"] = cfg.train.epochs;
    train["batch_size"] = cfg.train.batch_size;
    train["learning_rate"] = cfg.train.learning_rate;
    train["l2_decay"] = cfg.train.l2_decay;
    doc["train"] = train;
    doc["output_dir"] = cfg.output_dir;
    return doc.dump(2) + "\n";
}

std::vector<std::pair<int, double>> load_score_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open score file " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("score file is empty");
    std::vector<std::pair<int, double>> out;
    int row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++row;
        const auto comma = line.find(',');
        if (comma == std::string::npos)
            throw std::runtime_error("score file: malformed row " + std::to_string(row));
        try {
            out.emplace_back(std::stoi(line.substr(0, comma)),
                             std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw std::runtime_error("score file: malformed row " + std::to_string(row));
        }
    }
    return out;
}

PreparedExperiment prepare_experiment(const ExperimentConfig& cfg) {
    const RngSeed run_seed{cfg.seed};

    Dataset data = cfg.blob
                       ? synth_blobs(cfg.blob->per_class_counts, cfg.blob->dim, cfg.blob->spread,
                                     RngSeed{cfg.blob->seed.value_or(cfg.seed)})
                       : load_dataset(cfg.dataset_path);

    const int n = data.size();
    const int init_size = cfg.init_size > 0 ? cfg.init_size : cfg.budget;
    const int val_size = cfg.val_size > 0 ? cfg.val_size : std::max(n / 6, 1);
    if (init_size + val_size > n)
        throw ConfigError("init_size + val_size exceeds the dataset size");

    IndexSplit split = split_indices(n, init_size, val_size, run_seed);
    if (static_cast<long long>(cfg.rounds) * cfg.budget > static_cast<long long>(split.pool.size()))
        throw ConfigError("rounds * budget exceeds the pool size");

    EngineConfig engine;
    engine.rounds = cfg.rounds;
    engine.budget = cfg.budget;
    engine.n_cal = cfg.n_cal > 0 ? cfg.n_cal : std::max(1, std::min(cfg.budget / 12, 500));
    engine.alpha_grid = cfg.alpha_grid.empty() ? AlphaGrid::default_grid()
                                               : AlphaGrid(cfg.alpha_grid);
    engine.acquisition.kind = acquisition_kind_from_name(cfg.acquisition);
    engine.acquisition.exponent = cfg.acquisition_d;
    if (cfg.design == "csq") {
        engine.design.kind = QueryDesign::Kind::csq;
    } else if (cfg.design == "conventional") {
        engine.design.kind = QueryDesign::Kind::conventional;
    } else if (cfg.design == "oracle") {
        engine.design.kind = QueryDesign::Kind::oracle;
    } else {
        engine.design.kind = QueryDesign::Kind::topk;
        engine.design.k = cfg.topk;
    }
    engine.noise.epsilon = cfg.noise;
    engine.seed = run_seed;

    if (is_external_kind(engine.acquisition.kind)) {
        if (cfg.scores_file.empty())
            throw ConfigError("acquisition.scores_file: required for external kinds");
        engine.external_scores.assign(static_cast<std::size_t>(n), 0.0);
        std::vector<bool> seen(static_cast<std::size_t>(n), false);
        for (const auto& [id, score] : load_score_file(cfg.scores_file)) {
            if (id < 0 || id >= n)
                throw std::runtime_error("score file: pool id " + std::to_string(id) +
                                         " out of range");
            engine.external_scores[static_cast<std::size_t>(id)] = score;
            seen[static_cast<std::size_t>(id)] = true;
        }
        for (int id : split.pool) {
            if (!seen[static_cast<std::size_t>(id)])
                throw std::runtime_error("score file: missing score for pool id " +
                                         std::to_string(id));
        }
    }

    TrainConfig train = cfg.train;
    train.seed = run_seed;
    return PreparedExperiment{std::move(data), std::move(split), train, std::move(engine)};
}

}  // namespace csq
