#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "sparsefs/matrix.hpp"

namespace sparsefs::preprocess {

inline constexpr double kDefaultEpsilon = 1e-12;

/// Per-feature population mean and standard deviation of a training matrix.
struct StandardizationStats {
    Vector means;
    Vector stds;
    double epsilon = kDefaultEpsilon;

    [[nodiscard]] std::size_t size() const noexcept { return means.size(); }
};

[[nodiscard]] StandardizationStats fit_standardizer(const Matrix& x,
                                                    double epsilon = kDefaultEpsilon);

/// (x - mean) / max(std, epsilon), column by column.
[[nodiscard]] Matrix apply_standardizer(const Matrix& x, const StandardizationStats& stats);

/// Stats stored as a 2 x d matrix: row 0 means, row 1 stds.
[[nodiscard]] Matrix stats_to_matrix(const StandardizationStats& stats);
[[nodiscard]] StandardizationStats stats_from_matrix(const Matrix& m,
                                                     double epsilon = kDefaultEpsilon);

[[nodiscard]] Matrix one_hot(const LabelVector& labels, std::size_t n_classes);

/// Duplicates rows of every minority class, chosen uniformly with replacement,
/// until each present class matches the majority count. Originals keep their
/// order; duplicates are appended class by class in ascending label order.
[[nodiscard]] Dataset random_oversample(const Dataset& d, std::uint64_t seed);

struct SplitSpec {
    double train_fraction = 0.8;
    std::uint64_t seed = 0;
    bool stratified = true;
};

struct SplitIndices {
    std::vector<std::size_t> train;
    std::vector<std::size_t> test;
};

/// Row indices of each side, ascending. Stratified mode rounds per class.
[[nodiscard]] SplitIndices split_indices(const LabelVector& labels, const SplitSpec& spec);

[[nodiscard]] std::pair<Dataset, Dataset> train_test_split(const Dataset& d,
                                                           const SplitSpec& spec);

}  // namespace sparsefs::preprocess
