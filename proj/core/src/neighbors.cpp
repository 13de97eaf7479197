#include "sparsefs/neighbors.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "sparsefs/error.hpp"

namespace sparsefs::neighbors {

KnnModel knn_fit(Matrix x, LabelVector y, std::size_t k) {
    if (x.rows() != y.size()) {
        throw ContractError("knn_fit: " + std::to_string(x.rows()) + " rows but " +
                            std::to_string(y.size()) + " labels");
    }
    if (k == 0 || k > y.size()) {
        throw ContractError("knn_fit: k=" + std::to_string(k) + " must lie in [1, " +
                            std::to_string(y.size()) + "]");
    }
    return {std::move(x), std::move(y), k};
}

LabelVector knn_predict(const KnnModel& model, const Matrix& queries) {
    const auto& train = model.train_features;
    if (queries.cols() != train.cols()) {
        throw ContractError("knn_predict: queries have " + std::to_string(queries.cols()) +
                            " columns, model expects " + std::to_string(train.cols()));
    }
    const std::size_t n = train.rows();
    const std::size_t k = model.k;
    const std::size_t n_classes = infer_class_count(model.train_labels);

    LabelVector out(queries.rows());
    std::vector<std::pair<double, std::size_t>> dist(n);
    std::vector<std::size_t> votes(n_classes);
    for (std::size_t q = 0; q < queries.rows(); ++q) {
        const auto query = queries.row(q);
        for (std::size_t i = 0; i < n; ++i) {
            const auto r = train.row(i);
            double s = 0.0;
            for (std::size_t j = 0; j < r.size(); ++j) {
                const double diff = r[j] - query[j];
                s += diff * diff;
            }
            dist[i] = {s, i};
        }
        // Lexicographic pair order breaks distance ties by training index.
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(k), dist.end());
        std::ranges::fill(votes, 0);
        for (std::size_t i = 0; i < k; ++i) {
            ++votes[model.train_labels[dist[i].second]];
        }
        // max_element returns the first maximum, i.e. the smallest label.
        out[q] = static_cast<std::uint32_t>(std::ranges::max_element(votes) - votes.begin());
    }
    return out;
}

}  // namespace sparsefs::neighbors
