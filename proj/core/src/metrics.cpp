#include "sparsefs/metrics.hpp"

#include <string>

#include "sparsefs/error.hpp"

namespace sparsefs::metrics {

namespace {

double ratio(std::size_t num, std::size_t den) noexcept {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
}

}  // namespace

ConfusionMatrix confusion(const LabelVector& y_true, const LabelVector& y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw ContractError("confusion: " + std::to_string(y_true.size()) + " truths but " +
                            std::to_string(y_pred.size()) + " predictions");
    }
    ConfusionMatrix c;
    for (std::size_t i = 0; i < y_true.size(); ++i) {
        if (y_true[i] > 1 || y_pred[i] > 1) {
            throw ContractError("confusion: row " + std::to_string(i) +
                                " holds a label outside {0, 1}");
        }
        const bool truth = y_true[i] == 1;
        const bool pred = y_pred[i] == 1;
        if (truth && pred) {
            ++c.tp;
        } else if (!truth && pred) {
            ++c.fp;
        } else if (truth) {
            ++c.fn;
        } else {
            ++c.tn;
        }
    }
    return c;
}

double accuracy(const ConfusionMatrix& c) {
    if (c.total() == 0) {
        throw ContractError("accuracy: no evaluated samples");
    }
    return ratio(c.tp + c.tn, c.total());
}

double precision(const ConfusionMatrix& c) noexcept {
    return ratio(c.tp, c.tp + c.fp);
}

double recall(const ConfusionMatrix& c) noexcept {
    return ratio(c.tp, c.tp + c.fn);
}

// 2PR/(P+R) reduces to 2tp/(2tp+fp+fn), which avoids rounding in P and R.
double f1(const ConfusionMatrix& c) noexcept {
    return ratio(2 * c.tp, 2 * c.tp + c.fp + c.fn);
}

}  // namespace sparsefs::metrics
