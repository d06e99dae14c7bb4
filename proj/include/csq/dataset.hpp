#pragma once

#include <span>
#include <string>
#include <vector>

#include "csq/rng.hpp"

namespace csq {

/// Categorical label space {0, ..., num_classes-1}.
struct LabelSpace {
    int num_classes = 2;
};

/// Immutable feature matrix with integer labels. Row-major features,
/// one label per row, all labels in [0, L).
class Dataset {
public:
    Dataset(std::vector<double> features, std::vector<int> labels, LabelSpace label_space);

    int size() const { return static_cast<int>(labels_.size()); }
    int dim() const { return dim_; }
    int num_classes() const { return label_space_.num_classes; }
    const LabelSpace& label_space() const { return label_space_; }

    std::span<const double> row(int i) const {
        return {features_.data() + static_cast<std::size_t>(i) * dim_,
                static_cast<std::size_t>(dim_)};
    }
    int label(int i) const { return labels_[static_cast<std::size_t>(i)]; }
    const std::vector<int>& labels() const { return labels_; }
    const double* feature_data() const { return features_.data(); }

private:
    std::vector<double> features_;
    std::vector<int> labels_;
    LabelSpace label_space_;
    int dim_ = 0;
};

/// Disjoint index sets over one dataset. Each list is sorted ascending.
struct IndexSplit {
    std::vector<int> initial_labeled;
    std::vector<int> pool;
    std::vector<int> validation;
};

/// Reads `<path>` (CSV, columns f0..f{d-1},label) plus its sidecar
/// `<stem>.meta.json` declaring {"n":..,"d":..,"L":..}. Malformed rows are
/// reported with their 1-based data row number.
Dataset load_dataset(const std::string& csv_path);

/// Writes the CSV + sidecar pair. Features are printed with enough digits
/// that a reload reproduces every double exactly.
void save_dataset(const Dataset& data, const std::string& csv_path);

/// Uniformly random disjoint (initial, validation) subsets; the remainder is
/// the pool. Deterministic in the seed.
IndexSplit split_indices(int n, int init_size, int val_size, RngSeed seed);

/// Gaussian class clusters with means on a fixed lattice (spacing 10 per
/// axis), per-class counts exact. Deterministic in the seed.
Dataset synth_blobs(std::span<const int> per_class_counts, int dim, double spread, RngSeed seed);
Dataset synth_blobs(int n_per_class, int num_classes, int dim, double spread, RngSeed seed);

}  // namespace csq
