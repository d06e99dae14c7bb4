#include "csq/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace csq {

Dataset::Dataset(std::vector<double> features, std::vector<int> labels, LabelSpace label_space)
    : features_(std::move(features)), labels_(std::move(labels)), label_space_(label_space) {
    if (label_space_.num_classes < 2)
        throw std::invalid_argument("Dataset: need at least 2 classes");
    if (labels_.empty()) throw std::invalid_argument("empty dataset");
    if (features_.size() % labels_.size() != 0)
        throw std::invalid_argument("Dataset: feature matrix not rectangular");
    dim_ = static_cast<int>(features_.size() / labels_.size());
    if (dim_ < 1) throw std::invalid_argument("Dataset: need at least one feature column");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] < 0 || labels_[i] >= label_space_.num_classes)
            throw std::invalid_argument("label out of range at row " + std::to_string(i + 1));
    }
}

namespace {

std::string meta_path_for(const std::string& csv_path) {
    std::string stem = csv_path;
    if (stem.size() >= 4 && stem.compare(stem.size() - 4, 4, ".csv") == 0)
        stem.resize(stem.size() - 4);
    return stem + ".meta.json";
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

double parse_double(const std::string& s, int row) {
    std::size_t pos = 0;
    double v;
    try {
        v = std::stod(s, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("malformed value at row " + std::to_string(row));
    }
    if (pos != s.size() || !std::isfinite(v))
        throw std::runtime_error("malformed value at row " + std::to_string(row));
    return v;
}

int parse_label(const std::string& s, int row) {
    if (s.empty()) throw std::runtime_error("non-integer label at row " + std::to_string(row));
    std::size_t pos = 0;
    long v;
    try {
        v = std::stol(s, &pos);
    } catch (const std::exception&) {
        throw std::runtime_error("non-integer label at row " + std::to_string(row));
    }
    if (pos != s.size())
        throw std::runtime_error("non-integer label at row " + std::to_string(row));
    return static_cast<int>(v);
}

}  // namespace

Dataset load_dataset(const std::string& csv_path) {
    std::ifstream meta_in(meta_path_for(csv_path));
    if (!meta_in) throw std::runtime_error("cannot open " + meta_path_for(csv_path));
    nlohmann::json meta;
    try {
        meta_in >> meta;
    } catch (const std::exception& e) {
        throw std::runtime_error("invalid meta json: " + std::string(e.what()));
    }
    if (!meta.contains("n") || !meta.contains("d") || !meta.contains("L"))
        throw std::runtime_error("meta json must declare n, d and L");
    const int n = meta.at("n").get<int>();
    const int d = meta.at("d").get<int>();
    const int L = meta.at("L").get<int>();
    if (d < 1 || L < 2) throw std::runtime_error("meta json: d must be >= 1 and L >= 2");

    std::ifstream in(csv_path);
    if (!in) throw std::runtime_error("cannot open " + csv_path);

    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty dataset");

    std::vector<double> features;
    std::vector<int> labels;
    features.reserve(static_cast<std::size_t>(std::max(n, 0)) * d);
    labels.reserve(static_cast<std::size_t>(std::max(n, 0)));

    int row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        ++row;
        const auto fields = split_fields(line);
        if (static_cast<int>(fields.size()) != d + 1)
            throw std::runtime_error("inconsistent column count at row " + std::to_string(row));
        for (int j = 0; j < d; ++j) features.push_back(parse_double(fields[j], row));
        const int label = parse_label(fields.back(), row);
        if (label < 0 || label >= L)
            throw std::runtime_error("label out of range at row " + std::to_string(row));
        labels.push_back(label);
    }
    if (labels.empty()) throw std::runtime_error("empty dataset");
    if (row != n)
        throw std::runtime_error("meta json declares n=" + std::to_string(n) + " but file has " +
                                 std::to_string(row) + " rows");
    return Dataset(std::move(features), std::move(labels), LabelSpace{L});
}

void save_dataset(const Dataset& data, const std::string& csv_path) {
    std::ofstream out(csv_path);
    if (!out) throw std::runtime_error("cannot write " + csv_path);
    for (int j = 0; j < data.dim(); ++j) out << 'f' << j << ',';
    out << "label\n";
    char buf[40];
    for (int i = 0; i < data.size(); ++i) {
        const auto row = data.row(i);
        for (double v : row) {
            std::snprintf(buf, sizeof(buf), "%.17g", v);
            out << buf << ',';
        }
        out << data.label(i) << '\n';
    }
    if (!out) throw std::runtime_error("write failed for " + csv_path);

    std::ofstream meta(meta_path_for(csv_path));
    if (!meta) throw std::runtime_error("cannot write " + meta_path_for(csv_path));
    meta << "{ \"n\": " << data.size() << ", \"d\": " << data.dim() << ", \"L\": "
         << data.num_classes() << " }\n";
}

IndexSplit split_indices(int n, int init_size, int val_size, RngSeed seed) {
    if (n < 1) throw std::invalid_argument("split_indices: n must be positive");
    if (init_size < 0 || val_size < 0)
        throw std::invalid_argument("split_indices: sizes must be non-negative");
    if (init_size + val_size > n)
        throw std::invalid_argument("split_indices: sizes exceed n");

    std::vector<int> ids(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) ids[static_cast<std::size_t>(i)] = i;

    RngStream rng(seed, "split");
    for (int i = n - 1; i > 0; --i) {
        const auto j = static_cast<int>(rng.uniform_below(static_cast<std::uint64_t>(i) + 1));
        std::swap(ids[static_cast<std::size_t>(i)], ids[static_cast<std::size_t>(j)]);
    }

    IndexSplit split;
    split.initial_labeled.assign(ids.begin(), ids.begin() + init_size);
    split.validation.assign(ids.begin() + init_size, ids.begin() + init_size + val_size);
    split.pool.assign(ids.begin() + init_size + val_size, ids.end());
    std::sort(split.initial_labeled.begin(), split.initial_labeled.end());
    std::sort(split.validation.begin(), split.validation.end());
    std::sort(split.pool.begin(), split.pool.end());
    return split;
}

namespace {

// Class means sit on a lattice with spacing 10: class c gets the base-m digit
// expansion of c across dimensions, m = ceil(L^(1/d)), so all means are
// distinct and no two differ by less than one lattice step.
constexpr double kLatticeSpacing = 10.0;

std::vector<double> class_mean(int cls, int num_classes, int dim) {
    int m = 2;
    while (true) {
        double span = 1.0;
        bool enough = false;
        for (int j = 0; j < dim; ++j) {
            span *= m;
            if (span >= num_classes) {
                enough = true;
                break;
            }
        }
        if (enough) break;
        ++m;
    }
    std::vector<double> mean(static_cast<std::size_t>(dim), 0.0);
    int rest = cls;
    for (int j = 0; j < dim && rest > 0; ++j) {
        mean[static_cast<std::size_t>(j)] = kLatticeSpacing * (rest % m);
        rest /= m;
    }
    return mean;
}

}  // namespace

Dataset synth_blobs(std::span<const int> per_class_counts, int dim, double spread, RngSeed seed) {
    const int L = static_cast<int>(per_class_counts.size());
    if (L < 2) throw std::invalid_argument("synth_blobs: need at least 2 classes");
    if (dim < 1) throw std::invalid_argument("synth_blobs: dim must be positive");
    if (spread < 0.0) throw std::invalid_argument("synth_blobs: spread must be non-negative");

    std::size_t total = 0;
    for (int c : per_class_counts) {
        if (c < 1) throw std::invalid_argument("synth_blobs: per-class counts must be positive");
        total += static_cast<std::size_t>(c);
    }

    std::vector<double> features;
    std::vector<int> labels;
    features.reserve(total * static_cast<std::size_t>(dim));
    labels.reserve(total);

    RngStream rng(seed, "blobs");
    for (int c = 0; c < L; ++c) {
        const auto mean = class_mean(c, L, dim);
        for (int i = 0; i < per_class_counts[static_cast<std::size_t>(c)]; ++i) {
            for (int j = 0; j < dim; ++j)
                features.push_back(mean[static_cast<std::size_t>(j)] + spread * rng.normal());
            labels.push_back(c);
        }
    }
    return Dataset(std::move(features), std::move(labels), LabelSpace{L});
}

Dataset synth_blobs(int n_per_class, int num_classes, int dim, double spread, RngSeed seed) {
    if (num_classes < 2) throw std::invalid_argument("synth_blobs: need at least 2 classes");
    std::vector<int> counts(static_cast<std::size_t>(num_classes), n_per_class);
    return synth_blobs(counts, dim, spread, seed);
}

}  // namespace csq
