#pragma once

#include <cstdint>

#include "sparsefs/matrix.hpp"

namespace sparsefs::synthetic {

/// Sparse linear model y = X·w + noise with standard-normal X and
/// `n_informative` nonzero weights of magnitude in [1, 2) and random sign.
struct SyntheticSpec {
    std::size_t n_rows = 200;
    std::size_t n_features = 20;
    std::size_t n_informative = 5;
    double noise_sigma = 0.01;
    /// Share of rows labeled 1: the top fraction of y.
    double positive_fraction = 0.5;
    std::uint64_t seed = 0;

    void validate() const;
};

struct SyntheticData {
    Matrix features;
    Vector targets;
    LabelVector labels;
    Vector true_coef;
    FeatureMask true_support;
};

[[nodiscard]] SyntheticData make_sparse_linear(const SyntheticSpec& spec);

}  // namespace sparsefs::synthetic
