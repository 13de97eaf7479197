#pragma once

#include "sparsefs/matrix.hpp"

namespace sparsefs::linalg {

/// Eigenpairs of a symmetric matrix, eigenvalues in descending order.
/// Column k of `vectors` is the unit eigenvector for `values[k]`.
struct SymmetricEigen {
    Vector values;
    Matrix vectors;
};

/// Only the lower triangle of `s` is read.
[[nodiscard]] SymmetricEigen symmetric_eigen(const Matrix& s);

/// a·bᵀ for row-major inputs with equal column counts.
[[nodiscard]] Matrix multiply_transposed(const Matrix& a, const Matrix& b);

/// Flips `v` so that its entry of largest magnitude (first on ties) is positive.
void orient(std::span<double> v) noexcept;

}  // namespace sparsefs::linalg
