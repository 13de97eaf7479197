#pragma once

#include <cstddef>

#include "sparsefs/matrix.hpp"

namespace sparsefs::metrics {

/// Binary contingency counts; class 1 (defective) is positive.
struct ConfusionMatrix {
    std::size_t tp = 0;
    std::size_t fp = 0;
    std::size_t fn = 0;
    std::size_t tn = 0;

    [[nodiscard]] std::size_t total() const noexcept { return tp + fp + fn + tn; }
    friend bool operator==(const ConfusionMatrix&, const ConfusionMatrix&) = default;
};

[[nodiscard]] ConfusionMatrix confusion(const LabelVector& y_true, const LabelVector& y_pred);

// Zero denominators yield 0, except accuracy, which rejects an empty matrix.
[[nodiscard]] double accuracy(const ConfusionMatrix& c);
[[nodiscard]] double precision(const ConfusionMatrix& c) noexcept;
[[nodiscard]] double recall(const ConfusionMatrix& c) noexcept;
[[nodiscard]] double f1(const ConfusionMatrix& c) noexcept;

}  // namespace sparsefs::metrics
