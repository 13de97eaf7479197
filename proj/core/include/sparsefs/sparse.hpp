#pragma once

// L1-regularized least squares: coordinate-descent Lasso and Elastic Net,
// proximal-gradient ISTA/FISTA, and support extraction.
//
// Objectives, with r = X·beta - y and m = number of rows:
//   mean scale:  (1/2m)·||r||² + lambda·||beta||₁ [+ (l2/2)·||beta||²]
//   sum scale:   (1/2) ·||r||² + lambda·||beta||₁ [+ (l2/2)·||beta||²]

#include <cstddef>
#include <span>
#include <string_view>

#include "sparsefs/matrix.hpp"

namespace sparsefs::sparse {

enum class ScaleMode { mean, sum };

struct StepPolicy {
    enum class Kind { fixed, lipschitz, backtracking };

    Kind kind = Kind::lipschitz;
    /// Fixed step size, or the initial step for backtracking.
    double step = 1.0;
    /// Backtracking shrink factor in (0, 1).
    double shrink = 0.5;

    static StepPolicy fixed(double t) { return {Kind::fixed, t, 0.5}; }
    static StepPolicy lipschitz() { return {}; }
    static StepPolicy backtracking(double shrink = 0.5, double t0 = 1.0) {
        return {Kind::backtracking, t0, shrink};
    }
};

struct SolverConfig {
    double tol = 1e-6;
    std::size_t max_iter = 1000;
    ScaleMode scale = ScaleMode::mean;
    StepPolicy step;
    /// Subtract mean(y) before solving and report it as the intercept.
    bool center_targets = false;

    void validate() const;
};

struct CoefficientVector {
    Vector coef;
    double intercept = 0.0;
    double lambda = 0.0;
    /// L2 weight; zero for pure Lasso.
    double ridge = 0.0;
    /// Objective at the starting point followed by one value per iteration.
    Vector objective_history;
    std::size_t iterations = 0;
    bool converged = false;
};

/// alpha·(l1_ratio·||b||₁ + (1 - l1_ratio)/2·||b||²).
struct ElasticNetParams {
    double alpha = 0.01;
    double l1_ratio = 0.5;

    [[nodiscard]] double l1() const noexcept { return alpha * l1_ratio; }
    [[nodiscard]] double l2() const noexcept { return alpha * (1.0 - l1_ratio); }
    void validate() const;
};

struct GridShape {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;

    [[nodiscard]] std::size_t flat_size() const noexcept { return height * width * channels; }
};

inline constexpr double kDefaultZeroTol = 1e-12;

[[nodiscard]] double soft_threshold(double z, double t) noexcept;

[[nodiscard]] double lasso_objective(const Matrix& x, std::span<const double> y,
                                     std::span<const double> beta, double lambda,
                                     ScaleMode scale = ScaleMode::mean);

[[nodiscard]] double elastic_net_objective(const Matrix& x, std::span<const double> y,
                                           std::span<const double> beta,
                                           const ElasticNetParams& params,
                                           ScaleMode scale = ScaleMode::mean);

/// Smallest lambda for which the all-zero vector is optimal: ||s·Xᵀ(y - c)||∞,
/// where s is 1/m or 1 and c is mean(y) when `centered`, else 0.
[[nodiscard]] double zero_solution_lambda(const Matrix& x, std::span<const double> y,
                                          ScaleMode scale = ScaleMode::mean,
                                          bool centered = true);

/// Cyclic coordinate descent. Stops once a full sweep moves no coordinate by
/// more than cfg.tol.
[[nodiscard]] CoefficientVector lasso_cd(const Matrix& x, std::span<const double> y,
                                         double lambda, const SolverConfig& cfg = {});

[[nodiscard]] CoefficientVector elastic_net_cd(const Matrix& x, std::span<const double> y,
                                               const ElasticNetParams& params,
                                               const SolverConfig& cfg = {});

/// Aᵀ(A·x - b), the gradient of 0.5·||Ax - b||².
[[nodiscard]] Vector gradient_smooth(const Matrix& a, std::span<const double> b,
                                     std::span<const double> x);

/// Largest eigenvalue of AᵀA by power iteration.
[[nodiscard]] double lipschitz_constant(const Matrix& a, std::size_t max_iter = 100,
                                        double tol = 1e-8);

/// Proximal gradient from x = 0. With a fixed step, an objective increase
/// beyond rounding throws DivergenceError.
[[nodiscard]] CoefficientVector ista(const Matrix& a, std::span<const double> b, double lambda,
                                     const SolverConfig& cfg = {});

/// Nesterov-accelerated proximal gradient with function-value restart.
[[nodiscard]] CoefficientVector fista(const Matrix& a, std::span<const double> b, double lambda,
                                      const SolverConfig& cfg = {});

/// Indices with |coef| > zero_tol, ascending.
[[nodiscard]] FeatureMask support(std::span<const double> coef,
                                  double zero_tol = kDefaultZeroTol);
[[nodiscard]] inline FeatureMask support(const CoefficientVector& c,
                                         double zero_tol = kDefaultZeroTol) {
    return support(c.coef, zero_tol);
}

[[nodiscard]] Matrix select_features(const Matrix& x, const FeatureMask& mask);

/// Per-cell count of selected features, for features flattened in
/// (row, col, channel) row-major order.
[[nodiscard]] Matrix relevance_grid(const FeatureMask& mask, const GridShape& shape);

[[nodiscard]] Vector to_targets(const LabelVector& labels);

[[nodiscard]] std::string_view to_string(ScaleMode mode) noexcept;
[[nodiscard]] ScaleMode parse_scale_mode(std::string_view text);

}  // namespace sparsefs::sparse
