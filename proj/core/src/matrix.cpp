#include "sparsefs/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sparsefs/error.hpp"

namespace sparsefs {

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) {
        throw ContractError("matrix payload has " + std::to_string(values_.size()) +
                            " values, expected " + std::to_string(rows_ * cols_));
    }
}

Matrix Matrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) {
        return {};
    }
    const std::size_t cols = rows.front().size();
    std::vector<double> values;
    values.reserve(rows.size() * cols);
    for (const auto& r : rows) {
        if (r.size() != cols) {
            throw ContractError("ragged rows in Matrix::from_rows");
        }
        values.insert(values.end(), r.begin(), r.end());
    }
    return {rows.size(), cols, std::move(values)};
}

Matrix Matrix::take_rows(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] >= rows_) {
            throw ContractError("row index " + std::to_string(indices[i]) + " out of range");
        }
        std::ranges::copy(row(indices[i]), out.row(i).begin());
    }
    return out;
}

Matrix Matrix::transpose() const {
    Matrix out(cols_, rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
        for (std::size_t c = 0; c < cols_; ++c) {
            out(c, r) = (*this)(r, c);
        }
    }
    return out;
}

bool Matrix::all_finite() const noexcept {
    return std::ranges::all_of(values_, [](double v) { return std::isfinite(v); });
}

std::size_t infer_class_count(std::span<const std::uint32_t> labels) noexcept {
    if (labels.empty()) {
        return 0;
    }
    return static_cast<std::size_t>(*std::ranges::max_element(labels)) + 1;
}

void check_labels(std::span<const std::uint32_t> labels, std::size_t n_classes) {
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] >= n_classes) {
            throw ContractError("label " + std::to_string(labels[i]) + " at row " +
                                std::to_string(i) + " is not below class count " +
                                std::to_string(n_classes));
        }
    }
}

void Dataset::validate() const {
    if (features.rows() != labels.size()) {
        throw ContractError("dataset has " + std::to_string(features.rows()) +
                            " feature rows but " + std::to_string(labels.size()) + " labels");
    }
}

Dataset take(const Dataset& d, std::span<const std::size_t> indices) {
    d.validate();
    Dataset out{d.features.take_rows(indices), {}};
    out.labels.reserve(indices.size());
    for (auto i : indices) {
        out.labels.push_back(d.labels[i]);
    }
    return out;
}

void FeatureMask::validate() const {
    for (std::size_t i = 0; i < selected.size(); ++i) {
        if (selected[i] >= source_dim) {
            throw ContractError("mask index " + std::to_string(selected[i]) +
                                " out of range for source dimension " +
                                std::to_string(source_dim));
        }
        if (i > 0 && selected[i] <= selected[i - 1]) {
            throw ContractError("mask indices must be strictly increasing");
        }
    }
}

}  // namespace sparsefs
