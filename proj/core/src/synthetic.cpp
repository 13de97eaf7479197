#include "sparsefs/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sparsefs/error.hpp"
#include "sparsefs/random.hpp"

namespace sparsefs::synthetic {

void SyntheticSpec::validate() const {
    if (n_rows == 0 || n_features == 0) {
        throw ContractError("synthetic data needs at least one row and one feature");
    }
    if (n_informative > n_features) {
        throw ContractError("n_informative exceeds n_features");
    }
    if (!(noise_sigma >= 0.0)) {
        throw ContractError("noise_sigma must be non-negative");
    }
    if (!(positive_fraction > 0.0 && positive_fraction < 1.0)) {
        throw ContractError("positive_fraction must lie strictly between 0 and 1");
    }
}

SyntheticData make_sparse_linear(const SyntheticSpec& spec) {
    spec.validate();
    Rng rng(spec.seed);
    SyntheticData out;
    out.features = Matrix(spec.n_rows, spec.n_features);
    for (auto& v : out.features.values()) {
        v = rng.normal();
    }

    std::vector<std::size_t> pool(spec.n_features);
    for (std::size_t j = 0; j < pool.size(); ++j) {
        pool[j] = j;
    }
    for (std::size_t j = 0; j < spec.n_informative; ++j) {
        std::swap(pool[j], pool[j + rng.index(pool.size() - j)]);
    }
    out.true_support.source_dim = spec.n_features;
    out.true_support.selected.assign(pool.begin(),
                                     pool.begin() + static_cast<std::ptrdiff_t>(spec.n_informative));
    std::ranges::sort(out.true_support.selected);

    out.true_coef.assign(spec.n_features, 0.0);
    for (auto j : out.true_support.selected) {
        const double magnitude = 1.0 + rng.uniform();
        out.true_coef[j] = rng.uniform() < 0.5 ? -magnitude : magnitude;
    }

    out.targets.resize(spec.n_rows);
    for (std::size_t i = 0; i < spec.n_rows; ++i) {
        const auto r = out.features.row(i);
        double s = 0.0;
        for (auto j : out.true_support.selected) {
            s += r[j] * out.true_coef[j];
        }
        out.targets[i] = s + spec.noise_sigma * rng.normal();
    }

    // Label the top positive_fraction of targets as class 1.
    Vector sorted = out.targets;
    std::ranges::sort(sorted);
    const auto n_neg = static_cast<std::size_t>(
        std::llround((1.0 - spec.positive_fraction) * static_cast<double>(spec.n_rows)));
    const double threshold =
        n_neg == 0 ? -std::numeric_limits<double>::infinity() : sorted[std::min(n_neg, spec.n_rows) - 1];
    out.labels.resize(spec.n_rows);
    for (std::size_t i = 0; i < spec.n_rows; ++i) {
        out.labels[i] = out.targets[i] > threshold ? 1u : 0u;
    }
    return out;
}

}  // namespace sparsefs::synthetic
