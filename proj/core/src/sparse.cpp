#include "sparsefs/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "sparsefs/error.hpp"
#include "sparsefs/random.hpp"

namespace sparsefs::sparse {

namespace {

// Relative objective increase tolerated as floating-point noise. Anything
// larger is a genuine ascent step.
constexpr double kRoundingSlack = 1e-10;
constexpr std::size_t kMaxBacktracks = 200;

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double l1_norm(std::span<const double> v) {
    double s = 0.0;
    for (double e : v) {
        s += std::abs(e);
    }
    return s;
}

double scale_factor(ScaleMode mode, std::size_t m) {
    return mode == ScaleMode::mean ? 1.0 / static_cast<double>(m) : 1.0;
}

void check_problem(const Matrix& x, std::span<const double> y, const char* who) {
    if (x.rows() != y.size()) {
        throw ContractError(std::string(who) + ": matrix has " + std::to_string(x.rows()) +
                            " rows but target has " + std::to_string(y.size()) + " entries");
    }
    if (x.rows() == 0) {
        throw ContractError(std::string(who) + ": empty problem");
    }
    if (!x.all_finite() ||
        !std::ranges::all_of(y, [](double v) { return std::isfinite(v); })) {
        throw ContractError(std::string(who) + ": non-finite input");
    }
}

// residual = X·beta - y
void residual(const Matrix& x, std::span<const double> beta, std::span<const double> y,
              std::span<double> out) {
    for (std::size_t i = 0; i < x.rows(); ++i) {
        out[i] = dot(x.row(i), beta) - y[i];
    }
}

// out = Xᵀ·v
void transpose_times(const Matrix& x, std::span<const double> v, std::span<double> out) {
    std::ranges::fill(out, 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const double vi = v[i];
        if (vi == 0.0) {
            continue;
        }
        const auto row = x.row(i);
        for (std::size_t j = 0; j < row.size(); ++j) {
            out[j] += row[j] * vi;
        }
    }
}

struct Centered {
    Vector target;
    double intercept = 0.0;
};

Centered center(std::span<const double> y, bool enabled) {
    Centered c{Vector(y.begin(), y.end()), 0.0};
    if (enabled) {
        c.intercept = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
        for (auto& v : c.target) {
            v -= c.intercept;
        }
    }
    return c;
}

CoefficientVector coordinate_descent(const Matrix& x, std::span<const double> y, double l1,
                                     double l2, const SolverConfig& cfg, const char* who) {
    cfg.validate();
    check_problem(x, y, who);
    const std::size_t m = x.rows();
    const std::size_t d = x.cols();
    const double s = scale_factor(cfg.scale, m);
    auto [target, intercept] = center(y, cfg.center_targets);

    const Matrix columns = x.transpose();
    Vector col_sq(d);
    for (std::size_t j = 0; j < d; ++j) {
        col_sq[j] = s * dot(columns.row(j), columns.row(j));
    }

    CoefficientVector out;
    out.coef.assign(d, 0.0);
    out.intercept = intercept;
    out.lambda = l1;
    out.ridge = l2;
    auto& beta = out.coef;

    // r = y - X·beta, kept current as coordinates move.
    Vector r = target;
    auto objective = [&] {
        return 0.5 * s * dot(r, r) + l1 * l1_norm(beta) + 0.5 * l2 * dot(beta, beta);
    };
    out.objective_history.push_back(objective());

    for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
        double max_delta = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            if (col_sq[j] == 0.0) {
                continue;
            }
            const auto xj = columns.row(j);
            const double rho = s * dot(xj, r) + col_sq[j] * beta[j];
            const double updated = soft_threshold(rho, l1) / (col_sq[j] + l2);
            const double delta = updated - beta[j];
            if (delta != 0.0) {
                for (std::size_t i = 0; i < m; ++i) {
                    r[i] -= delta * xj[i];
                }
                beta[j] = updated;
                max_delta = std::max(max_delta, std::abs(delta));
            }
        }
        out.objective_history.push_back(objective());
        out.iterations = it;
        if (max_delta < cfg.tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

struct ProxProblem {
    const Matrix& a;
    Vector b;
    double intercept;
    double scale;
    double lambda;

    // Fills r = A·x - b and returns (scale/2)·||r||².
    double smooth(std::span<const double> x, std::span<double> r) const {
        residual(a, x, b, r);
        return 0.5 * scale * dot(r, r);
    }
    void grad_from_residual(std::span<const double> r, std::span<double> g) const {
        transpose_times(a, r, g);
        for (auto& v : g) {
            v *= scale;
        }
    }
};

double initial_step(const ProxProblem& p, const StepPolicy& policy) {
    switch (policy.kind) {
        case StepPolicy::Kind::fixed:
        case StepPolicy::Kind::backtracking:
            return policy.step;
        case StepPolicy::Kind::lipschitz: {
            const double lip = p.scale * lipschitz_constant(p.a);
            return lip > 0.0 ? 1.0 / lip : 1.0;
        }
    }
    return policy.step;
}

// One proximal step from `base` with gradient `g`. Shrinks `t` in place under
// backtracking until the quadratic upper model holds. Returns smooth(next).
double prox_step(const ProxProblem& p, const StepPolicy& policy, std::span<const double> base,
                 double smooth_base, std::span<const double> g, double& t, std::span<double> next,
                 std::span<double> r_next, std::size_t iteration) {
    for (std::size_t attempt = 0;; ++attempt) {
        for (std::size_t j = 0; j < base.size(); ++j) {
            next[j] = soft_threshold(base[j] - t * g[j], t * p.lambda);
        }
        const double smooth_next = p.smooth(next, r_next);
        if (policy.kind != StepPolicy::Kind::backtracking) {
            return smooth_next;
        }
        double linear = 0.0;
        double dist_sq = 0.0;
        for (std::size_t j = 0; j < base.size(); ++j) {
            const double dj = next[j] - base[j];
            linear += g[j] * dj;
            dist_sq += dj * dj;
        }
        const double model = smooth_base + linear + dist_sq / (2.0 * t);
        if (smooth_next <= model + kRoundingSlack * 1e-2 * std::max(1.0, std::abs(smooth_base))) {
            return smooth_next;
        }
        if (attempt >= kMaxBacktracks) {
            throw DivergenceError("backtracking line search did not find a step", iteration);
        }
        t *= policy.shrink;
    }
}

ProxProblem make_prox_problem(const Matrix& a, std::span<const double> b, double lambda,
                              const SolverConfig& cfg, const char* who) {
    cfg.validate();
    check_problem(a, b, who);
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw ContractError(std::string(who) + ": lambda must be finite and non-negative");
    }
    auto [target, intercept] = center(b, cfg.center_targets);
    return {a, std::move(target), intercept, scale_factor(cfg.scale, a.rows()), lambda};
}

}  // namespace

void SolverConfig::validate() const {
    if (!(tol > 0.0)) {
        throw ContractError("solver tol must be positive");
    }
    if (max_iter == 0) {
        throw ContractError("solver max_iter must be positive");
    }
    if (!(step.step > 0.0) || !std::isfinite(step.step)) {
        throw ContractError("step size must be positive and finite");
    }
    if (step.kind == StepPolicy::Kind::backtracking && !(step.shrink > 0.0 && step.shrink < 1.0)) {
        throw ContractError("backtracking shrink factor must lie in (0, 1)");
    }
}

void ElasticNetParams::validate() const {
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
        throw ContractError("elastic net alpha must be finite and non-negative");
    }
    if (!(l1_ratio >= 0.0 && l1_ratio <= 1.0)) {
        throw ContractError("elastic net l1_ratio must lie in [0, 1]");
    }
}

double soft_threshold(double z, double t) noexcept {
    if (z > t) {
        return z - t;
    }
    if (z < -t) {
        return z + t;
    }
    return 0.0;
}

double lasso_objective(const Matrix& x, std::span<const double> y, std::span<const double> beta,
                       double lambda, ScaleMode scale) {
    return elastic_net_objective(x, y, beta, ElasticNetParams{lambda, 1.0}, scale);
}

double elastic_net_objective(const Matrix& x, std::span<const double> y,
                             std::span<const double> beta, const ElasticNetParams& params,
                             ScaleMode scale) {
    if (x.rows() != y.size() || x.cols() != beta.size()) {
        throw ContractError("objective: dimension mismatch between matrix, target, and coef");
    }
    Vector r(x.rows());
    residual(x, beta, y, r);
    const double s = x.rows() == 0 ? 0.0 : scale_factor(scale, x.rows());
    return 0.5 * s * dot(r, r) + params.l1() * l1_norm(beta) + 0.5 * params.l2() * dot(beta, beta);
}

double zero_solution_lambda(const Matrix& x, std::span<const double> y, ScaleMode scale,
                            bool centered) {
    check_problem(x, y, "zero_solution_lambda");
    const auto [target, intercept] = center(y, centered);
    Vector g(x.cols());
    transpose_times(x, target, g);
    double worst = 0.0;
    for (double v : g) {
        worst = std::max(worst, std::abs(v));
    }
    return worst * scale_factor(scale, x.rows());
}

CoefficientVector lasso_cd(const Matrix& x, std::span<const double> y, double lambda,
                           const SolverConfig& cfg) {
    if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
        throw ContractError("lasso_cd: lambda must be finite and non-negative");
    }
    return coordinate_descent(x, y, lambda, 0.0, cfg, "lasso_cd");
}

CoefficientVector elastic_net_cd(const Matrix& x, std::span<const double> y,
                                 const ElasticNetParams& params, const SolverConfig& cfg) {
    params.validate();
    return coordinate_descent(x, y, params.l1(), params.l2(), cfg, "elastic_net_cd");
}

Vector gradient_smooth(const Matrix& a, std::span<const double> b, std::span<const double> x) {
    if (a.rows() != b.size() || a.cols() != x.size()) {
        throw ContractError("gradient_smooth: dimension mismatch");
    }
    Vector r(a.rows());
    residual(a, x, b, r);
    Vector g(a.cols());
    transpose_times(a, r, g);
    return g;
}

double lipschitz_constant(const Matrix& a, std::size_t max_iter, double tol) {
    if (a.rows() == 0 || a.cols() == 0) {
        return 0.0;
    }
    Rng rng(0x9E3779B97F4A7C15ull);
    Vector v(a.cols());
    for (auto& e : v) {
        e = rng.normal();
    }
    auto normalize = [](Vector& w) {
        const double n = std::sqrt(dot(w, w));
        if (n > 0.0) {
            for (auto& e : w) {
                e /= n;
            }
        }
        return n;
    };
    normalize(v);
    Vector av(a.rows());
    Vector w(a.cols());
    double estimate = 0.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        for (std::size_t i = 0; i < a.rows(); ++i) {
            av[i] = dot(a.row(i), v);
        }
        transpose_times(a, av, w);
        const double rayleigh = dot(v, w);
        if (normalize(w) == 0.0) {
            return 0.0;
        }
        v.swap(w);
        const bool settled = std::abs(rayleigh - estimate) <= tol * std::abs(rayleigh);
        estimate = rayleigh;
        if (settled) {
            break;
        }
    }
    return estimate;
}

CoefficientVector ista(const Matrix& a, std::span<const double> b, double lambda,
                       const SolverConfig& cfg) {
    const auto p = make_prox_problem(a, b, lambda, cfg, "ista");
    const std::size_t m = a.rows();
    const std::size_t d = a.cols();
    double t = initial_step(p, cfg.step);

    CoefficientVector out;
    out.coef.assign(d, 0.0);
    out.intercept = p.intercept;
    out.lambda = lambda;
    auto& x = out.coef;

    Vector r(m), r_next(m), g(d), next(d);
    double smooth = p.smooth(x, r);
    double total = smooth + lambda * l1_norm(x);
    out.objective_history.push_back(total);

    for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
        p.grad_from_residual(r, g);
        const double smooth_next = prox_step(p, cfg.step, x, smooth, g, t, next, r_next, it);
        const double total_next = smooth_next + lambda * l1_norm(next);
        if (total_next > total) {
            if (total_next - total > kRoundingSlack * std::max(1.0, std::abs(total))) {
                throw DivergenceError("objective increased from " + std::to_string(total) +
                                          " to " + std::to_string(total_next) +
                                          "; step size exceeds 1/L",
                                      it);
            }
            // No representable descent remains; keep the current iterate.
            out.converged = true;
            break;
        }
        double max_delta = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            max_delta = std::max(max_delta, std::abs(next[j] - x[j]));
        }
        x.swap(next);
        r.swap(r_next);
        smooth = smooth_next;
        total = total_next;
        out.objective_history.push_back(total);
        out.iterations = it;
        if (max_delta < cfg.tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

CoefficientVector fista(const Matrix& a, std::span<const double> b, double lambda,
                        const SolverConfig& cfg) {
    const auto p = make_prox_problem(a, b, lambda, cfg, "fista");
    const std::size_t m = a.rows();
    const std::size_t d = a.cols();
    double t = initial_step(p, cfg.step);

    CoefficientVector out;
    out.coef.assign(d, 0.0);
    out.intercept = p.intercept;
    out.lambda = lambda;
    auto& x = out.coef;

    Vector y_pt(d, 0.0), r_y(m), r_next(m), g(d), next(d);
    double smooth_y = p.smooth(y_pt, r_y);
    double total = smooth_y + lambda * l1_norm(x);
    out.objective_history.push_back(total);
    double theta = 1.0;

    for (std::size_t it = 1; it <= cfg.max_iter; ++it) {
        p.grad_from_residual(r_y, g);
        const double smooth_next = prox_step(p, cfg.step, y_pt, smooth_y, g, t, next, r_next, it);
        const double total_next = smooth_next + lambda * l1_norm(next);
        if (!std::isfinite(total_next)) {
            throw DivergenceError("objective is no longer finite", it);
        }

        double max_delta = 0.0;
        for (std::size_t j = 0; j < d; ++j) {
            max_delta = std::max(max_delta, std::abs(next[j] - x[j]));
        }
        if (total_next > total) {
            // Function-value restart: drop the momentum.
            theta = 1.0;
            y_pt = next;
        } else {
            const double theta_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * theta * theta));
            const double momentum = (theta - 1.0) / theta_next;
            for (std::size_t j = 0; j < d; ++j) {
                y_pt[j] = next[j] + momentum * (next[j] - x[j]);
            }
            theta = theta_next;
        }
        x.swap(next);
        total = total_next;
        smooth_y = p.smooth(y_pt, r_y);
        out.objective_history.push_back(total);
        out.iterations = it;
        if (max_delta < cfg.tol) {
            out.converged = true;
            break;
        }
    }
    return out;
}

FeatureMask support(std::span<const double> coef, double zero_tol) {
    if (!(zero_tol >= 0.0)) {
        throw ContractError("support: zero_tol must be non-negative");
    }
    FeatureMask mask{{}, coef.size()};
    for (std::size_t j = 0; j < coef.size(); ++j) {
        if (std::abs(coef[j]) > zero_tol) {
            mask.selected.push_back(j);
        }
    }
    return mask;
}

Matrix select_features(const Matrix& x, const FeatureMask& mask) {
    if (mask.source_dim != x.cols()) {
        throw ContractError("select_features: mask built for " + std::to_string(mask.source_dim) +
                            " features, matrix has " + std::to_string(x.cols()));
    }
    mask.validate();
    Matrix out(x.rows(), mask.size());
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto src = x.row(i);
        auto dst = out.row(i);
        for (std::size_t k = 0; k < mask.size(); ++k) {
            dst[k] = src[mask.selected[k]];
        }
    }
    return out;
}

Matrix relevance_grid(const FeatureMask& mask, const GridShape& shape) {
    if (mask.source_dim != shape.flat_size()) {
        throw ContractError("relevance_grid: mask covers " + std::to_string(mask.source_dim) +
                            " features, shape " + std::to_string(shape.height) + "x" +
                            std::to_string(shape.width) + "x" + std::to_string(shape.channels) +
                            " holds " + std::to_string(shape.flat_size()));
    }
    mask.validate();
    Matrix grid(shape.height, shape.width);
    for (auto flat : mask.selected) {
        const std::size_t cell = flat / shape.channels;
        grid(cell / shape.width, cell % shape.width) += 1.0;
    }
    return grid;
}

Vector to_targets(const LabelVector& labels) {
    return {labels.begin(), labels.end()};
}

std::string_view to_string(ScaleMode mode) noexcept {
    return mode == ScaleMode::mean ? "mean" : "sum";
}

ScaleMode parse_scale_mode(std::string_view text) {
    if (text == "mean") {
        return ScaleMode::mean;
    }
    if (text == "sum") {
        return ScaleMode::sum;
    }
    throw ContractError("unknown scale mode '" + std::string(text) + "' (expected mean or sum)");
}

}  // namespace sparsefs::sparse
