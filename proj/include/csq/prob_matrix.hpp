#pragma once

#include <span>
#include <vector>

namespace csq {

/// Dense row-major matrix of per-sample class probabilities. Each row is a
/// point on the probability simplex over the label space.
class ProbMatrix {
public:
    ProbMatrix() = default;
    ProbMatrix(int rows, int cols)
        : rows_(rows), cols_(cols),
          data_(static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols), 0.0) {}

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    std::span<const double> row(int i) const {
        return {data_.data() + static_cast<std::size_t>(i) * cols_,
                static_cast<std::size_t>(cols_)};
    }
    std::span<double> row(int i) {
        return {data_.data() + static_cast<std::size_t>(i) * cols_,
                static_cast<std::size_t>(cols_)};
    }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    /// Copy of the selected rows, in the given order.
    ProbMatrix gather(std::span<const int> row_ids) const {
        ProbMatrix out(static_cast<int>(row_ids.size()), cols_);
        for (std::size_t i = 0; i < row_ids.size(); ++i) {
            const auto src = row(row_ids[i]);
            std::copy(src.begin(), src.end(), out.row(static_cast<int>(i)).begin());
        }
        return out;
    }

private:
    int rows_ = 0;
    int cols_ = 0;
    std::vector<double> data_;
};

}  // namespace csq
