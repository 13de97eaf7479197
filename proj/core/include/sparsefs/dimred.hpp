#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sparsefs/matrix.hpp"

namespace sparsefs::dimred {

/// Principal axes of centered data.
struct PcaModel {
    Vector mean;
    /// k x d, rows orthonormal, largest-magnitude entry of each row positive.
    Matrix components;
    /// Population variance along each component, nonincreasing.
    Vector explained_variance;

    [[nodiscard]] std::size_t n_components() const noexcept { return components.rows(); }
};

/// Requires n >= 2 and 1 <= k <= min(n - 1, d). Decomposes the d x d
/// covariance when d <= n, otherwise the n x n Gram matrix.
[[nodiscard]] PcaModel pca_fit(const Matrix& x, std::size_t k);
[[nodiscard]] Matrix pca_transform(const Matrix& x, const PcaModel& model);
[[nodiscard]] Matrix pca_inverse(const Matrix& z, const PcaModel& model);

enum class Kernel {
    rbf,
    /// Plain dot product. Reduces kernel PCA to PCA; meant for testing.
    linear,
};

/// exp(-gamma·||a - b||²) for rbf, a·b for linear.
[[nodiscard]] double kernel_value(std::span<const double> a, std::span<const double> b,
                                  Kernel kernel, double gamma);

/// n_a x n_b kernel matrix between the rows of `a` and `b`.
[[nodiscard]] Matrix kernel_matrix(const Matrix& a, const Matrix& b, Kernel kernel,
                                   double gamma);

/// Subtracts row means and column means and adds back the grand mean.
[[nodiscard]] Matrix double_center(const Matrix& k);

struct KpcaModel {
    Matrix train_data;
    Kernel kernel = Kernel::rbf;
    double gamma = 1.0;
    /// n x k eigenvectors of the centered kernel, each scaled by 1/sqrt(eigenvalue).
    Matrix alphas;
    Vector eigenvalues;
    Vector kernel_row_means;
    double kernel_grand_mean = 0.0;
    /// Projections of the training rows computed during fitting (n x k).
    Matrix fit_projection;
    std::vector<std::string> warnings;

    [[nodiscard]] std::size_t n_components() const noexcept { return alphas.cols(); }
};

/// Eigenvalues at or below this are discarded.
inline constexpr double kKpcaMinEigenvalue = 1e-10;

/// Requires gamma > 0 and 1 <= k <= n. Keeps fewer than k components, with a
/// warning, when the centered kernel has fewer positive eigenvalues.
[[nodiscard]] KpcaModel kpca_fit(const Matrix& x, std::size_t k, double gamma,
                                 Kernel kernel = Kernel::rbf);
[[nodiscard]] Matrix kpca_transform(const Matrix& x, const KpcaModel& model);

/// 1/d, the default RBF width.
[[nodiscard]] double default_gamma(std::size_t n_features) noexcept;

// A model directory holds SPFM matrices plus meta.txt (k, gamma, variances).
void save_pca(const PcaModel& model, const std::filesystem::path& dir);
[[nodiscard]] PcaModel load_pca(const std::filesystem::path& dir);
void save_kpca(const KpcaModel& model, const std::filesystem::path& dir);
[[nodiscard]] KpcaModel load_kpca(const std::filesystem::path& dir);

}  // namespace sparsefs::dimred
