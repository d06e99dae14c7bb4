#pragma once

#include <memory>
#include <span>
#include <vector>

#include "csq/dataset.hpp"
#include "csq/prob_matrix.hpp"
#include "csq/rng.hpp"

namespace csq {

/// Anything that yields class probabilities for dataset rows. The output is a
/// pure function of (model, rows): row order matches the input order and is
/// independent of batching or execution schedule.
class ProbModel {
public:
    virtual ~ProbModel() = default;
    virtual ProbMatrix predict_proba(const Dataset& data, std::span<const int> indices) const = 0;
};

/// Test double returning pre-stored probability rows for the whole dataset.
class FrozenModel final : public ProbModel {
public:
    explicit FrozenModel(ProbMatrix probs) : probs_(std::move(probs)) {}
    ProbMatrix predict_proba(const Dataset&, std::span<const int> indices) const override {
        return probs_.gather(indices);
    }

private:
    ProbMatrix probs_;
};

struct TrainConfig {
    int epochs = 200;
    int batch_size = 64;
    double learning_rate = 0.1;
    double l2_decay = 1e-4;
    RngSeed seed;
};

/// Multinomial softmax regression on standardized features. Weights start at
/// zero (the objective is convex), so training is deterministic in the config
/// seed, which only drives the mini-batch shuffle.
class SoftmaxModel final : public ProbModel {
public:
    SoftmaxModel(int num_classes, int dim);

    /// Fully specified parameters (weights row-major L x d), standardization
    /// given as per-column mean and standard deviation.
    SoftmaxModel(int num_classes, int dim, std::vector<double> weights, std::vector<double> bias,
                 std::vector<double> feat_mean, std::vector<double> feat_std);

    ProbMatrix predict_proba(const Dataset& data, std::span<const int> indices) const override;

    /// Cross-entropy plus L2 penalty over the given rows with the model's
    /// current parameters and stored standardization.
    double loss(const Dataset& data, std::span<const int> indices,
                std::span<const int> labels, double l2_decay) const;

    int num_classes() const { return num_classes_; }
    int dim() const { return dim_; }
    const std::vector<double>& weights() const { return weights_; }
    const std::vector<double>& bias() const { return bias_; }

private:
    friend SoftmaxModel train(const Dataset&, std::span<const int>, std::span<const int>,
                              const TrainConfig&);

    int num_classes_;
    int dim_;
    std::vector<double> weights_;   // L x d, row-major
    std::vector<double> bias_;      // L
    std::vector<double> feat_mean_; // d
    std::vector<double> feat_inv_std_;
};

/// Mini-batch gradient descent on (features[indices], labels). Labels are
/// passed separately from the dataset so annotated (possibly noisy) labels
/// can be trained on. Standardization statistics come from the same rows.
SoftmaxModel train(const Dataset& data, std::span<const int> indices,
                   std::span<const int> labels, const TrainConfig& cfg);

/// Fraction of rows whose argmax probability matches the dataset label.
/// Argmax ties resolve to the smallest class id.
double accuracy(const ProbModel& model, const Dataset& data, std::span<const int> indices);

/// Abstract training step used by the experiment engine, so tests can swap
/// in frozen-probability models.
class Trainer {
public:
    virtual ~Trainer() = default;
    virtual std::unique_ptr<ProbModel> fit(const Dataset& data, std::span<const int> indices,
                                           std::span<const int> labels) const = 0;
};

class SoftmaxTrainer final : public Trainer {
public:
    explicit SoftmaxTrainer(TrainConfig cfg) : cfg_(cfg) {}
    std::unique_ptr<ProbModel> fit(const Dataset& data, std::span<const int> indices,
                                   std::span<const int> labels) const override {
        return std::make_unique<SoftmaxModel>(train(data, indices, labels, cfg_));
    }

private:
    TrainConfig cfg_;
};

/// Trainer that ignores the labeled data and always returns the same frozen
/// probability table.
class FrozenTrainer final : public Trainer {
public:
    explicit FrozenTrainer(ProbMatrix probs) : probs_(std::move(probs)) {}
    std::unique_ptr<ProbModel> fit(const Dataset&, std::span<const int>,
                                   std::span<const int>) const override {
        return std::make_unique<FrozenModel>(probs_);
    }

private:
    ProbMatrix probs_;
};

namespace detail {

/// Analytic gradient of the batch softmax cross-entropy + L2 objective at
/// (weights, bias) for pre-standardized inputs z. Shared by the trainer and
/// checked against finite differences in the tests.
void softmax_loss_grad(std::span<const double> weights, std::span<const double> bias,
                       const ProbMatrix& z_rows, std::span<const int> labels, double l2_decay,
                       double* loss_out, std::span<double> grad_w, std::span<double> grad_b);

double softmax_loss_only(std::span<const double> weights, std::span<const double> bias,
                         const ProbMatrix& z_rows, std::span<const int> labels, double l2_decay);

}  // namespace detail

}  // namespace csq
