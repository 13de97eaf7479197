#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "../support/oracles.hpp"
#include "sparsefs/error.hpp"
#include "sparsefs/neighbors.hpp"

using namespace sparsefs;
using namespace sparsefs::neighbors;

namespace {

LabelVector random_labels(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    LabelVector y(n);
    for (auto& v : y) v = static_cast<std::uint32_t>(rng.index(2));
    return y;
}

}  // namespace

TEST_CASE("knn_predict: one-dimensional example") {
    const auto x = Matrix::from_rows({{0}, {1}, {2}, {10}, {11}});
    const auto model = knn_fit(x, {0, 0, 0, 1, 1}, 3);
    CHECK(knn_predict(model, Matrix::from_rows({{0.5}, {10.5}, {6.2}})) == LabelVector{0, 1, 1});
}

TEST_CASE("knn_predict: vote ties go to the smaller label") {
    const auto x = Matrix::from_rows({{-1}, {1}});
    const auto model = knn_fit(x, {1, 0}, 2);
    CHECK(knn_predict(model, Matrix::from_rows({{0}})) == LabelVector{0});
}

TEST_CASE("knn_predict: distance ties go to the lower training index") {
    const auto x = Matrix::from_rows({{-1}, {1}, {5}});
    CHECK(knn_predict(knn_fit(x, {1, 0, 0}, 1), Matrix::from_rows({{0}})) == LabelVector{1});
    CHECK(knn_predict(knn_fit(x, {0, 1, 0}, 1), Matrix::from_rows({{0}})) == LabelVector{0});
}

TEST_CASE("knn_fit validation") {
    const auto x = oracle::gaussian(4, 2, 1);
    CHECK_THROWS_AS((void)knn_fit(x, {0, 1, 0, 1}, 0), ContractError);
    CHECK_THROWS_AS((void)knn_fit(x, {0, 1, 0, 1}, 5), ContractError);
    CHECK_THROWS_AS((void)knn_fit(x, {0, 1, 0}, 1), ContractError);
    const auto all = knn_fit(x, {0, 1, 1, 1}, 4);
    CHECK(knn_predict(all, oracle::gaussian(3, 2, 2)) == LabelVector{1, 1, 1});
    CHECK_THROWS_AS((void)knn_predict(all, oracle::gaussian(3, 3, 2)), ContractError);
}

TEST_CASE("knn agrees with the brute-force oracle") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto train = oracle::gaussian(200, 6, seed);
        const auto labels = random_labels(200, seed + 100);
        const auto queries = oracle::gaussian(50, 6, seed + 200);
        for (std::size_t k : {1, 5, 8}) {
            CHECK(knn_predict(knn_fit(train, labels, k), queries) ==
                  oracle::brute_force_knn(train, labels, queries, k));
        }
    }
}

TEST_CASE("property: predictions do not depend on training row order") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto train = oracle::gaussian(80, 4, seed + 10);
        const auto labels = random_labels(80, seed + 11);
        const auto queries = oracle::gaussian(30, 4, seed + 12);
        std::vector<std::size_t> perm(80);
        std::iota(perm.begin(), perm.end(), 0);
        Rng rng(seed);
        rng.shuffle(std::span<std::size_t>(perm));
        LabelVector permuted(80);
        for (std::size_t i = 0; i < 80; ++i) permuted[i] = labels[perm[i]];
        // Odd k and continuous data make distance ties a measure-zero event.
        CHECK(knn_predict(knn_fit(train, labels, 5), queries) ==
              knn_predict(knn_fit(train.take_rows(perm), permuted, 5), queries));
    }
}

TEST_CASE("property: k = 1 reproduces training labels on distinct points") {
    const auto train = oracle::gaussian(100, 3, 5);
    const auto labels = random_labels(100, 6);
    CHECK(knn_predict(knn_fit(train, labels, 1), train) == labels);
}

TEST_CASE("property: uniform scaling leaves predictions unchanged") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto train = oracle::gaussian(60, 5, seed + 50);
        const auto labels = random_labels(60, seed + 51);
        auto queries = oracle::gaussian(20, 5, seed + 52);
        const auto before = knn_predict(knn_fit(train, labels, 3), queries);
        for (auto& v : train.values()) v *= 4.0;
        for (auto& v : queries.values()) v *= 4.0;
        CHECK(knn_predict(knn_fit(train, labels, 3), queries) == before);
    }
}
