#pragma once

#include "sparsefs/matrix.hpp"

namespace sparsefs::neighbors {

inline constexpr std::size_t kDefaultK = 5;

/// Brute-force Euclidean k-nearest-neighbors classifier. Stores its
/// training set verbatim.
struct KnnModel {
    Matrix train_features;
    LabelVector train_labels;
    std::size_t k = kDefaultK;
};

[[nodiscard]] KnnModel knn_fit(Matrix x, LabelVector y, std::size_t k = kDefaultK);

/// Majority vote among the k nearest training rows. Distance ties go to the
/// lower training index; vote ties go to the smaller label.
[[nodiscard]] LabelVector knn_predict(const KnnModel& model, const Matrix& queries);

}  // namespace sparsefs::neighbors
