#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace sparsefs {

/// Dense row-major matrix of doubles.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), values_(rows * cols, fill) {}

    /// Takes ownership of `values`; throws ContractError if the length is not rows*cols.
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    /// Builds from nested rows; all rows must have equal length.
    static Matrix from_rows(const std::vector<std::vector<double>>& rows);

    [[nodiscard]] std::size_t rows() const noexcept { return rows_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
    [[nodiscard]] bool empty() const noexcept { return values_.empty(); }

    double& operator()(std::size_t r, std::size_t c) noexcept { return values_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }

    [[nodiscard]] std::span<double> row(std::size_t r) noexcept {
        return {values_.data() + r * cols_, cols_};
    }
    [[nodiscard]] std::span<const double> row(std::size_t r) const noexcept {
        return {values_.data() + r * cols_, cols_};
    }

    [[nodiscard]] std::span<double> values() noexcept { return values_; }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    /// Copy of the rows listed in `indices`, in that order.
    [[nodiscard]] Matrix take_rows(std::span<const std::size_t> indices) const;
    [[nodiscard]] Matrix transpose() const;
    [[nodiscard]] bool all_finite() const noexcept;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

using Vector = std::vector<double>;
using LabelVector = std::vector<std::uint32_t>;

/// max(label)+1, or 0 for an empty vector.
[[nodiscard]] std::size_t infer_class_count(std::span<const std::uint32_t> labels) noexcept;

/// Throws ContractError if any label >= n_classes.
void check_labels(std::span<const std::uint32_t> labels, std::size_t n_classes);

/// Feature matrix plus one label per row.
struct Dataset {
    Matrix features;
    LabelVector labels;

    /// Throws ContractError unless features.rows() == labels.size().
    void validate() const;
    [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
};

/// Rows of `d` listed in `indices`, in order.
[[nodiscard]] Dataset take(const Dataset& d, std::span<const std::size_t> indices);

}  // namespace sparsefs

namespace sparsefs {

/// Strictly increasing indices of selected features out of `source_dim`.
struct FeatureMask {
    std::vector<std::size_t> selected;
    std::size_t source_dim = 0;

    /// Throws ContractError on an unsorted, duplicated, or out-of-range index.
    void validate() const;
    [[nodiscard]] std::size_t size() const noexcept { return selected.size(); }
    [[nodiscard]] bool empty() const noexcept { return selected.empty(); }

    friend bool operator==(const FeatureMask&, const FeatureMask&) = default;
};

}  // namespace sparsefs
