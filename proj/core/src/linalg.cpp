#include "sparsefs/linalg.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "sparsefs/error.hpp"

namespace sparsefs::linalg {

namespace {

using RowMajor = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

Eigen::Map<const RowMajor> view(const Matrix& m) {
    return {m.values().data(), static_cast<Eigen::Index>(m.rows()),
            static_cast<Eigen::Index>(m.cols())};
}

}  // namespace

SymmetricEigen symmetric_eigen(const Matrix& s) {
    if (s.rows() != s.cols()) {
        throw ContractError("symmetric_eigen: matrix is not square");
    }
    const auto n = static_cast<Eigen::Index>(s.rows());
    SymmetricEigen out{Vector(s.rows()), Matrix(s.rows(), s.rows())};
    if (n == 0) {
        return out;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(view(s), Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw ContractError("symmetric_eigen: decomposition did not converge");
    }
    // Eigen returns ascending order.
    const auto& values = solver.eigenvalues();
    const auto& vectors = solver.eigenvectors();
    for (Eigen::Index k = 0; k < n; ++k) {
        const Eigen::Index src = n - 1 - k;
        out.values[static_cast<std::size_t>(k)] = values(src);
        for (Eigen::Index i = 0; i < n; ++i) {
            out.vectors(static_cast<std::size_t>(i), static_cast<std::size_t>(k)) = vectors(i, src);
        }
    }
    return out;
}

Matrix multiply_transposed(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) {
        throw ContractError("multiply_transposed: column counts differ");
    }
    Matrix out(a.rows(), b.rows());
    if (out.empty()) {
        return out;
    }
    Eigen::Map<RowMajor> dst(out.values().data(), static_cast<Eigen::Index>(out.rows()),
                             static_cast<Eigen::Index>(out.cols()));
    dst.noalias() = view(a) * view(b).transpose();
    return out;
}

void orient(std::span<double> v) noexcept {
    double largest = 0.0;
    for (double e : v) {
        largest = std::max(largest, std::abs(e));
    }
    // Entries within rounding of the maximum count as tied; the first one decides.
    std::size_t best = 0;
    while (best < v.size() && std::abs(v[best]) < largest * (1.0 - 1e-9)) {
        ++best;
    }
    if (best < v.size() && v[best] < 0.0) {
        for (auto& e : v) {
            e = -e;
        }
    }
}

}  // namespace sparsefs::linalg
