#include "sparsefs/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sparsefs/error.hpp"
#include "sparsefs/random.hpp"

namespace sparsefs::preprocess {

StandardizationStats fit_standardizer(const Matrix& x, double epsilon) {
    if (x.rows() == 0) {
        throw ContractError("fit_standardizer: matrix has no rows");
    }
    if (!(epsilon > 0.0)) {
        throw ContractError("fit_standardizer: epsilon must be positive");
    }
    const std::size_t n = x.rows();
    const std::size_t d = x.cols();
    StandardizationStats s{Vector(d, 0.0), Vector(d, 0.0), epsilon};
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = x.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            s.means[j] += r[j];
        }
    }
    for (auto& m : s.means) {
        m /= static_cast<double>(n);
    }
    // Second pass on centered values keeps the variance free of cancellation.
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = x.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            const double dev = r[j] - s.means[j];
            s.stds[j] += dev * dev;
        }
    }
    for (auto& v : s.stds) {
        v = std::sqrt(v / static_cast<double>(n));
    }
    return s;
}

Matrix apply_standardizer(const Matrix& x, const StandardizationStats& stats) {
    if (x.cols() != stats.means.size() || stats.stds.size() != stats.means.size()) {
        throw ContractError("apply_standardizer: matrix has " + std::to_string(x.cols()) +
                            " columns, stats cover " + std::to_string(stats.means.size()));
    }
    Matrix out(x.rows(), x.cols());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto in = x.row(i);
        auto dst = out.row(i);
        for (std::size_t j = 0; j < x.cols(); ++j) {
            dst[j] = (in[j] - stats.means[j]) / std::max(stats.stds[j], stats.epsilon);
        }
    }
    return out;
}

Matrix stats_to_matrix(const StandardizationStats& stats) {
    Matrix m(2, stats.means.size());
    std::ranges::copy(stats.means, m.row(0).begin());
    std::ranges::copy(stats.stds, m.row(1).begin());
    return m;
}

StandardizationStats stats_from_matrix(const Matrix& m, double epsilon) {
    if (m.rows() != 2) {
        throw ContractError("standardization stats matrix must have 2 rows");
    }
    StandardizationStats s;
    s.means.assign(m.row(0).begin(), m.row(0).end());
    s.stds.assign(m.row(1).begin(), m.row(1).end());
    s.epsilon = epsilon;
    if (std::ranges::any_of(s.stds, [](double v) { return v < 0.0; })) {
        throw ContractError("standardization stats contain a negative std");
    }
    return s;
}

Matrix one_hot(const LabelVector& labels, std::size_t n_classes) {
    check_labels(labels, n_classes);
    Matrix out(labels.size(), n_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        out(i, labels[i]) = 1.0;
    }
    return out;
}

Dataset random_oversample(const Dataset& d, std::uint64_t seed) {
    d.validate();
    const std::size_t n_classes = infer_class_count(d.labels);
    std::vector<std::vector<std::size_t>> members(n_classes);
    for (std::size_t i = 0; i < d.labels.size(); ++i) {
        members[d.labels[i]].push_back(i);
    }
    std::size_t present = 0;
    std::size_t majority = 0;
    for (const auto& m : members) {
        if (!m.empty()) {
            ++present;
            majority = std::max(majority, m.size());
        }
    }
    if (present < 2) {
        throw ContractError("random_oversample: need at least two classes, found " +
                            std::to_string(present));
    }

    std::vector<std::size_t> order(d.size());
    for (std::size_t i = 0; i < order.size(); ++i) {
        order[i] = i;
    }
    Rng rng(seed);
    for (const auto& m : members) {
        if (m.empty()) {
            continue;
        }
        for (std::size_t k = m.size(); k < majority; ++k) {
            order.push_back(m[rng.index(m.size())]);
        }
    }
    return take(d, order);
}

SplitIndices split_indices(const LabelVector& labels, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0)) {
        throw ContractError("train_fraction must lie strictly between 0 and 1");
    }
    if (labels.size() < 2) {
        throw ContractError("train_test_split: need at least two rows");
    }
    Rng rng(spec.seed);
    SplitIndices out;
    auto assign = [&](std::vector<std::size_t> group) {
        rng.shuffle(std::span<std::size_t>(group));
        const auto n_train = static_cast<std::size_t>(
            std::llround(spec.train_fraction * static_cast<double>(group.size())));
        out.train.insert(out.train.end(), group.begin(), group.begin() + n_train);
        out.test.insert(out.test.end(), group.begin() + n_train, group.end());
    };

    if (spec.stratified) {
        std::vector<std::vector<std::size_t>> members(infer_class_count(labels));
        for (std::size_t i = 0; i < labels.size(); ++i) {
            members[labels[i]].push_back(i);
        }
        for (auto& m : members) {
            if (!m.empty()) {
                assign(std::move(m));
            }
        }
    } else {
        std::vector<std::size_t> all(labels.size());
        for (std::size_t i = 0; i < all.size(); ++i) {
            all[i] = i;
        }
        assign(std::move(all));
    }
    if (out.train.empty() || out.test.empty()) {
        throw ContractError("train_test_split: fraction " + std::to_string(spec.train_fraction) +
                            " leaves an empty " + (out.train.empty() ? "train" : "test") +
                            " set");
    }
    std::ranges::sort(out.train);
    std::ranges::sort(out.test);
    return out;
}

std::pair<Dataset, Dataset> train_test_split(const Dataset& d, const SplitSpec& spec) {
    d.validate();
    const auto idx = split_indices(d.labels, spec);
    return {take(d, idx.train), take(d, idx.test)};
}

}  // namespace sparsefs::preprocess
