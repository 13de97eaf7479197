#include <doctest.h>

#include "sparsefs/error.hpp"
#include "sparsefs/metrics.hpp"
#include "sparsefs/random.hpp"

using namespace sparsefs;
using namespace sparsefs::metrics;

TEST_CASE("four-sample hand example") {
    const auto c = confusion({0, 0, 1, 1}, {0, 1, 1, 1});
    CHECK(c == ConfusionMatrix{2, 1, 0, 1});
    CHECK(accuracy(c) == 0.75);
    CHECK(precision(c) == doctest::Approx(2.0 / 3.0));
    CHECK(recall(c) == 1.0);
    CHECK(f1(c) == 0.8);
}

TEST_CASE("confusion and scores on a balanced example") {
    const LabelVector truth{1, 1, 0, 0, 1, 0, 1, 0};
    const LabelVector pred{1, 0, 0, 1, 1, 0, 1, 0};
    const auto c = confusion(truth, pred);
    CHECK(c == ConfusionMatrix{3, 1, 1, 3});
    CHECK(accuracy(c) == 0.75);
    CHECK(precision(c) == 0.75);
    CHECK(recall(c) == 0.75);
    CHECK(f1(c) == 0.75);
}

TEST_CASE("scores with unequal precision and recall") {
    const ConfusionMatrix c{2, 0, 1, 1};
    CHECK(accuracy(c) == 0.75);
    CHECK(precision(c) == 1.0);
    CHECK(recall(c) == doctest::Approx(2.0 / 3.0));
    CHECK(f1(c) == 0.8);
}

TEST_CASE("zero denominators yield zero; accuracy rejects empty input") {
    const ConfusionMatrix negatives{0, 0, 0, 4};
    CHECK(precision(negatives) == 0.0);
    CHECK(recall(negatives) == 0.0);
    CHECK(f1(negatives) == 0.0);
    CHECK(accuracy(negatives) == 1.0);
    CHECK_THROWS_AS((void)accuracy(ConfusionMatrix{}), ContractError);
}

TEST_CASE("confusion validation") {
    CHECK_THROWS_AS((void)confusion({0, 1}, {0}), ContractError);
    CHECK_THROWS_AS((void)confusion({0, 2}, {0, 1}), ContractError);
}

TEST_CASE("property: swapping truth and prediction transposes the matrix") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        LabelVector a(20);
        LabelVector b(20);
        for (std::size_t i = 0; i < 20; ++i) {
            a[i] = static_cast<std::uint32_t>(rng.index(2));
            b[i] = static_cast<std::uint32_t>(rng.index(2));
        }
        const auto c = confusion(a, b);
        const auto t = confusion(b, a);
        CHECK(c.tp == t.tp);
        CHECK(c.tn == t.tn);
        CHECK(c.fp == t.fn);
        CHECK(c.fn == t.fp);
        CHECK(c.total() == 20);
        CHECK(precision(c) == doctest::Approx(recall(t)));
        const double p = precision(c);
        const double r = recall(c);
        if (p + r > 0.0) {
            CHECK(f1(c) == doctest::Approx(2 * p * r / (p + r)).epsilon(1e-12));
        }
    }
}
