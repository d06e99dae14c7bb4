#include "csq/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "csq/kernels.hpp"

namespace csq {

SoftmaxModel::SoftmaxModel(int num_classes, int dim)
    : num_classes_(num_classes), dim_(dim),
      weights_(static_cast<std::size_t>(num_classes) * dim, 0.0),
      bias_(static_cast<std::size_t>(num_classes), 0.0),
      feat_mean_(static_cast<std::size_t>(dim), 0.0),
      feat_inv_std_(static_cast<std::size_t>(dim), 1.0) {
    if (num_classes < 2) throw std::invalid_argument("SoftmaxModel: need at least 2 classes");
    if (dim < 1) throw std::invalid_argument("SoftmaxModel: dim must be positive");
}

SoftmaxModel::SoftmaxModel(int num_classes, int dim, std::vector<double> weights,
                           std::vector<double> bias, std::vector<double> feat_mean,
                           std::vector<double> feat_std)
    : SoftmaxModel(num_classes, dim) {
    if (weights.size() != weights_.size() || bias.size() != bias_.size() ||
        feat_mean.size() != feat_mean_.size() || feat_std.size() != feat_inv_std_.size())
        throw std::invalid_argument("SoftmaxModel: parameter shapes do not match (L, d)");
    weights_ = std::move(weights);
    bias_ = std::move(bias);
    feat_mean_ = std::move(feat_mean);
    for (std::size_t j = 0; j < feat_std.size(); ++j) {
        if (feat_std[j] <= 0.0) throw std::invalid_argument("SoftmaxModel: stddev must be positive");
        feat_inv_std_[j] = 1.0 / feat_std[j];
    }
}

ProbMatrix SoftmaxModel::predict_proba(const Dataset& data, std::span<const int> indices) const {
    ProbMatrix out(static_cast<int>(indices.size()), num_classes_);
    kernels::softmax_predict_rows(data.feature_data(), data.dim(), indices, weights_.data(),
                                  bias_.data(), feat_mean_.data(), feat_inv_std_.data(),
                                  num_classes_, out);
    return out;
}

namespace detail {

namespace {

// Probabilities for one standardized row under (weights, bias).
void row_probs(std::span<const double> weights, std::span<const double> bias,
               std::span<const double> z, std::span<double> p) {
    const int L = static_cast<int>(bias.size());
    const int d = static_cast<int>(z.size());
    double max_logit = -std::numeric_limits<double>::infinity();
    for (int c = 0; c < L; ++c) {
        double logit = bias[static_cast<std::size_t>(c)];
        const double* w = weights.data() + static_cast<std::size_t>(c) * d;
        for (int j = 0; j < d; ++j) logit += w[j] * z[static_cast<std::size_t>(j)];
        p[static_cast<std::size_t>(c)] = logit;
        max_logit = std::max(max_logit, logit);
    }
    double sum = 0.0;
    for (int c = 0; c < L; ++c) {
        const double e = std::exp(p[static_cast<std::size_t>(c)] - max_logit);
        p[static_cast<std::size_t>(c)] = e;
        sum += e;
    }
    for (int c = 0; c < L; ++c) p[static_cast<std::size_t>(c)] /= sum;
}

}  // namespace

void softmax_loss_grad(std::span<const double> weights, std::span<const double> bias,
                       const ProbMatrix& z_rows, std::span<const int> labels, double l2_decay,
                       double* loss_out, std::span<double> grad_w, std::span<double> grad_b) {
    const int L = static_cast<int>(bias.size());
    const int d = z_rows.cols();
    const int n = z_rows.rows();
    std::fill(grad_w.begin(), grad_w.end(), 0.0);
    std::fill(grad_b.begin(), grad_b.end(), 0.0);

    double loss = 0.0;
    std::vector<double> p(static_cast<std::size_t>(L));
    for (int i = 0; i < n; ++i) {
        const auto z = z_rows.row(i);
        row_probs(weights, bias, z, p);
        const int y = labels[static_cast<std::size_t>(i)];
        loss -= std::log(std::max(p[static_cast<std::size_t>(y)], 1e-300));
        for (int c = 0; c < L; ++c) {
            const double delta = p[static_cast<std::size_t>(c)] - (c == y ? 1.0 : 0.0);
            grad_b[static_cast<std::size_t>(c)] += delta;
            double* gw = grad_w.data() + static_cast<std::size_t>(c) * d;
            for (int j = 0; j < d; ++j) gw[j] += delta * z[static_cast<std::size_t>(j)];
        }
    }
    const double inv_n = 1.0 / n;
    loss *= inv_n;
    for (double& g : grad_b) g *= inv_n;
    double sq = 0.0;
    for (std::size_t k = 0; k < grad_w.size(); ++k) {
        grad_w[k] = grad_w[k] * inv_n + l2_decay * weights[k];
        sq += weights[k] * weights[k];
    }
    loss += 0.5 * l2_decay * sq;
    *loss_out = loss;
}

double softmax_loss_only(std::span<const double> weights, std::span<const double> bias,
                         const ProbMatrix& z_rows, std::span<const int> labels, double l2_decay) {
    const int L = static_cast<int>(bias.size());
    const int n = z_rows.rows();
    double loss = 0.0;
    std::vector<double> p(static_cast<std::size_t>(L));
    for (int i = 0; i < n; ++i) {
        row_probs(weights, bias, z_rows.row(i), p);
        loss -= std::log(std::max(p[static_cast<std::size_t>(labels[static_cast<std::size_t>(i)])], 1e-300));
    }
    loss /= n;
    double sq = 0.0;
    for (double w : weights) sq += w * w;
    return loss + 0.5 * l2_decay * sq;
}

}  // namespace detail

double SoftmaxModel::loss(const Dataset& data, std::span<const int> indices,
                          std::span<const int> labels, double l2_decay) const {
    ProbMatrix z(static_cast<int>(indices.size()), dim_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        const auto x = data.row(indices[i]);
        auto zi = z.row(static_cast<int>(i));
        for (int j = 0; j < dim_; ++j)
            zi[static_cast<std::size_t>(j)] =
                (x[static_cast<std::size_t>(j)] - feat_mean_[static_cast<std::size_t>(j)]) *
                feat_inv_std_[static_cast<std::size_t>(j)];
    }
    return detail::softmax_loss_only(weights_, bias_, z, labels, l2_decay);
}

SoftmaxModel train(const Dataset& data, std::span<const int> indices,
                   std::span<const int> labels, const TrainConfig& cfg) {
    if (indices.empty()) throw std::invalid_argument("train: labeled set is empty");
    if (indices.size() != labels.size())
        throw std::invalid_argument("train: indices and labels misaligned");
    if (cfg.epochs < 0 || cfg.batch_size < 1 || cfg.learning_rate <= 0.0 || cfg.l2_decay < 0.0)
        throw std::invalid_argument("train: invalid config");
    for (int id : indices) {
        if (id < 0 || id >= data.size()) throw std::invalid_argument("train: index out of range");
    }
    for (int y : labels) {
        if (y < 0 || y >= data.num_classes()) throw std::invalid_argument("train: label out of range");
    }

    const int L = data.num_classes();
    const int d = data.dim();
    const int n = static_cast<int>(indices.size());
    SoftmaxModel model(L, d);

    // Standardization statistics from the labeled rows. Constant columns get
    // unit scale so they contribute nothing after centering.
    for (int j = 0; j < d; ++j) {
        double mean = 0.0;
        for (int i = 0; i < n; ++i) mean += data.row(indices[static_cast<std::size_t>(i)])[static_cast<std::size_t>(j)];
        mean /= n;
        double var = 0.0;
        for (int i = 0; i < n; ++i) {
            const double dx = data.row(indices[static_cast<std::size_t>(i)])[static_cast<std::size_t>(j)] - mean;
            var += dx * dx;
        }
        var /= n;
        model.feat_mean_[static_cast<std::size_t>(j)] = mean;
        model.feat_inv_std_[static_cast<std::size_t>(j)] = var > 1e-24 ? 1.0 / std::sqrt(var) : 1.0;
    }

    ProbMatrix z(n, d);
    for (int i = 0; i < n; ++i) {
        const auto x = data.row(indices[static_cast<std::size_t>(i)]);
        auto zi = z.row(i);
        for (int j = 0; j < d; ++j)
            zi[static_cast<std::size_t>(j)] =
                (x[static_cast<std::size_t>(j)] - model.feat_mean_[static_cast<std::size_t>(j)]) *
                model.feat_inv_std_[static_cast<std::size_t>(j)];
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
    RngStream shuffle_rng(cfg.seed, "train");

    std::vector<double> grad_w(model.weights_.size());
    std::vector<double> grad_b(model.bias_.size());
    std::vector<int> batch_labels;
    double loss = 0.0;

    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        for (int i = n - 1; i > 0; --i) {
            const auto j = static_cast<int>(shuffle_rng.uniform_below(static_cast<std::uint64_t>(i) + 1));
            std::swap(order[static_cast<std::size_t>(i)], order[static_cast<std::size_t>(j)]);
        }
        for (int start = 0; start < n; start += cfg.batch_size) {
            const int len = std::min(cfg.batch_size, n - start);
            ProbMatrix zb(len, d);
            batch_labels.resize(static_cast<std::size_t>(len));
            for (int i = 0; i < len; ++i) {
                const int src = order[static_cast<std::size_t>(start + i)];
                const auto zr = z.row(src);
                std::copy(zr.begin(), zr.end(), zb.row(i).begin());
                batch_labels[static_cast<std::size_t>(i)] = labels[static_cast<std::size_t>(src)];
            }
            detail::softmax_loss_grad(model.weights_, model.bias_, zb, batch_labels,
                                      cfg.l2_decay, &loss, grad_w, grad_b);
            for (std::size_t k = 0; k < grad_w.size(); ++k)
                model.weights_[k] -= cfg.learning_rate * grad_w[k];
            for (std::size_t k = 0; k < grad_b.size(); ++k)
                model.bias_[k] -= cfg.learning_rate * grad_b[k];
        }
    }
    return model;
}

double accuracy(const ProbModel& model, const Dataset& data, std::span<const int> indices) {
    if (indices.empty()) throw std::invalid_argument("accuracy: empty index list");
    const ProbMatrix probs = model.predict_proba(data, indices);
    int correct = 0;
    for (int i = 0; i < probs.rows(); ++i) {
        const auto row = probs.row(i);
        int best = 0;
        for (int c = 1; c < probs.cols(); ++c) {
            if (row[static_cast<std::size_t>(c)] > row[static_cast<std::size_t>(best)]) best = c;
        }
        if (best == data.label(indices[static_cast<std::size_t>(i)])) ++correct;
    }
    return static_cast<double>(correct) / static_cast<double>(indices.size());
}

}  // namespace csq
