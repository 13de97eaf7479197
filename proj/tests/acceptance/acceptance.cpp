// Prints one PASS/FAIL line per acceptance criterion; exits nonzero on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "support/oracles.hpp"
#include "sparsefs/dimred.hpp"
#include "sparsefs/metrics.hpp"
#include "sparsefs/neighbors.hpp"
#include "sparsefs/pipeline.hpp"
#include "sparsefs/sparse.hpp"
#include "sparsefs/synthetic.hpp"

using namespace sparsefs;

namespace {

// Sparse recovery instance frozen from a sweep with the naive reference
// solver: seed 1 recovers the true support for lambda in [0.08, 1.0].
constexpr std::uint64_t kRecoverySeed = 1;
constexpr double kRecoveryLambda = 0.3;

// End-to-end instance, run at the default lambda of 0.01.
constexpr std::size_t kE2eRows = 800;
constexpr std::uint64_t kE2eSeed = 0;
constexpr double kE2eLambda = 0.01;

struct Outcome {
    bool pass = true;
    std::string detail;
};

// Collects a verdict: any failed check fails the criterion and keeps the first message.
class Verdict {
public:
    void check(bool ok, const std::string& what) {
        if (!ok && pass_) {
            pass_ = false;
            first_failure_ = what;
        }
    }
    [[nodiscard]] Outcome done(const std::string& summary) const {
        return {pass_, pass_ ? summary : first_failure_};
    }

private:
    bool pass_ = true;
    std::string first_failure_;
};

std::string fmt(double v) {
    std::ostringstream s;
    s.precision(3);
    s << v;
    return s.str();
}

Vector centered(Vector y) {
    const double mean = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(y.size());
    for (auto& v : y) v -= mean;
    return y;
}

struct Instance {
    Matrix x;
    Vector y;
};

// Standardized Gaussian design, three-term signal, centered target.
Instance instance(std::size_t m, std::size_t d, std::uint64_t seed) {
    Instance in{oracle::standardize(oracle::gaussian(m, d, seed)), {}};
    const auto noise = oracle::gaussian_vector(m, seed + 7919);
    in.y.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        in.y[i] = 2.0 * in.x(i, 0) - 1.5 * in.x(i, d / 2) + in.x(i, d - 1) + 0.5 * noise[i];
    }
    in.y = centered(in.y);
    return in;
}

sparse::SolverConfig tight(sparse::ScaleMode scale = sparse::ScaleMode::mean) {
    sparse::SolverConfig cfg;
    cfg.tol = 1e-10;
    cfg.max_iter = 1000000;
    cfg.scale = scale;
    return cfg;
}

Outcome closed_form_lasso() {
    Verdict v;
    const auto x = Matrix::from_rows({{1}, {1}});
    double worst = 0.0;
    for (double lambda : {0.0, 1.0, 3.5}) {
        const auto c = sparse::lasso_cd(x, Vector{2, 4}, lambda, tight());
        const double err = std::abs(c.coef[0] - oracle::soft(3.0, lambda));
        worst = std::max(worst, err);
        v.check(err < 1e-8, "lambda " + fmt(lambda) + ": error " + fmt(err));
    }
    return v.done("max error " + fmt(worst));
}

Outcome solver_agreement() {
    Verdict v;
    double worst = 0.0;
    std::size_t ista_steps = 0;
    const double lambda = 0.1;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto in = instance(50, 200, seed);
        const auto cfg = tight();
        const auto cd = sparse::lasso_cd(in.x, in.y, lambda, cfg);
        const auto is = sparse::ista(in.x, in.y, lambda, cfg);
        const auto fa = sparse::fista(in.x, in.y, lambda, cfg);
        auto obj = [&](const Vector& b) { return sparse::lasso_objective(in.x, in.y, b, lambda); };
        const double ref = obj(cd.coef);
        for (double o : {obj(is.coef), obj(fa.coef)}) {
            const double rel = std::abs(o - ref) / std::abs(ref);
            worst = std::max(worst, rel);
            v.check(rel < 1e-6, "seed " + std::to_string(seed) + ": relative gap " + fmt(rel));
        }
        v.check(cd.converged && is.converged && fa.converged,
                "seed " + std::to_string(seed) + ": a solver hit max_iter");
        for (std::size_t k = 1; k < is.objective_history.size(); ++k) {
            v.check(is.objective_history[k] <= is.objective_history[k - 1],
                    "seed " + std::to_string(seed) + ": ista objective rose at step " +
                        std::to_string(k));
        }
        ista_steps += is.iterations;
    }
    return v.done("max relative gap " + fmt(worst) + ", " + std::to_string(ista_steps) +
                  " ista steps, histories nonincreasing");
}

Outcome kkt() {
    Verdict v;
    double worst = 0.0;
    std::size_t checked = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        for (double lambda : {0.05, 0.1, 0.3}) {
            const auto in = instance(50, 200, seed);
            const auto cfg = tight();
            const auto c = sparse::lasso_cd(in.x, in.y, lambda, cfg);
            const double m = static_cast<double>(in.x.rows());
            Vector r(in.x.rows());
            for (std::size_t i = 0; i < in.x.rows(); ++i) {
                double fit = 0.0;
                for (std::size_t k = 0; k < in.x.cols(); ++k) fit += in.x(i, k) * c.coef[k];
                r[i] = in.y[i] - fit;
            }
            for (std::size_t j = 0; j < in.x.cols(); ++j) {
                double g = 0.0;
                for (std::size_t i = 0; i < in.x.rows(); ++i) g += in.x(i, j) * r[i];
                g /= m;
                const double viol = c.coef[j] != 0.0
                                        ? std::abs(g - lambda * std::copysign(1.0, c.coef[j]))
                                        : std::max(0.0, std::abs(g) - lambda);
                worst = std::max(worst, viol);
                v.check(viol <= 10 * cfg.tol, "seed " + std::to_string(seed) + " coordinate " +
                                                  std::to_string(j) + ": violation " + fmt(viol));
                ++checked;
            }
        }
    }
    return v.done(std::to_string(checked) + " conditions, max violation " + fmt(worst));
}

Outcome enet_reduction() {
    Verdict v;
    double worst_lasso = 0.0;
    double worst_ols = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto wide = instance(50, 200, seed + 100);
        const auto lasso = sparse::lasso_cd(wide.x, wide.y, 0.05, tight());
        const auto enet = sparse::elastic_net_cd(wide.x, wide.y, {0.05, 1.0}, tight());
        for (std::size_t j = 0; j < lasso.coef.size(); ++j) {
            worst_lasso = std::max(worst_lasso, std::abs(lasso.coef[j] - enet.coef[j]));
        }
        const auto tall = instance(200, 8, seed + 200);
        const auto ols = oracle::ols(tall.x, tall.y);
        const auto ridge0 = sparse::elastic_net_cd(tall.x, tall.y, {0.0, 0.5}, tight());
        for (std::size_t j = 0; j < ols.size(); ++j) {
            worst_ols = std::max(worst_ols, std::abs(ols[j] - ridge0.coef[j]));
        }
    }
    v.check(worst_lasso < 1e-10, "l1_ratio=1 differs from lasso by " + fmt(worst_lasso));
    v.check(worst_ols < 1e-8, "alpha=0 differs from OLS by " + fmt(worst_ols));
    return v.done("lasso gap " + fmt(worst_lasso) + ", OLS gap " + fmt(worst_ols));
}

Outcome gradient_check() {
    Verdict v;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto a = oracle::gaussian(30, 20, seed + 300);
        const auto b = oracle::gaussian_vector(30, seed + 301);
        const auto x = oracle::gaussian_vector(20, seed + 302);
        const auto g = sparse::gradient_smooth(a, b, x);
        const auto fd = oracle::finite_difference(
            [&](const Vector& p) { return oracle::half_sq_residual(a, b, p); }, x, 1e-6);
        double num = 0.0;
        double den = 0.0;
        for (std::size_t j = 0; j < g.size(); ++j) {
            num += (g[j] - fd[j]) * (g[j] - fd[j]);
            den += fd[j] * fd[j];
        }
        const double rel = std::sqrt(num / den);
        worst = std::max(worst, rel);
        v.check(rel < 1e-5, "seed " + std::to_string(seed) + ": relative error " + fmt(rel));
    }
    return v.done("max relative error " + fmt(worst));
}

Outcome sparse_recovery() {
    Verdict v;
    const auto syn = synthetic::make_sparse_linear({100, 500, 10, 0.01, 0.5, kRecoverySeed});
    auto cfg = tight();
    cfg.center_targets = true;
    const auto c = sparse::lasso_cd(syn.features, syn.targets, kRecoveryLambda, cfg);
    const auto found = sparse::support(c);
    v.check(found.selected == syn.true_support.selected,
            "recovered " + std::to_string(found.size()) + " features, true support has " +
                std::to_string(syn.true_support.size()));
    return v.done("seed " + std::to_string(kRecoverySeed) + ", lambda " + fmt(kRecoveryLambda) +
                  ": 10 of 10 recovered, no extras");
}

Outcome knn_oracle() {
    Verdict v;
    std::size_t queries = 0;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const std::size_t n = 50 + 10 * seed;
        const std::size_t d = 2 + seed % 7;
        const std::size_t k = 1 + seed % 9;
        const auto train = oracle::gaussian(n, d, seed + 400);
        LabelVector labels(n);
        Rng rng(seed + 401);
        for (auto& l : labels) l = static_cast<std::uint32_t>(rng.index(2));
        const auto q = oracle::gaussian(40, d, seed + 402);
        const auto got = neighbors::knn_predict(neighbors::knn_fit(train, labels, k), q);
        v.check(got == oracle::brute_force_knn(train, labels, q, k),
                "seed " + std::to_string(seed) + ": predictions differ");
        queries += q.rows();
    }
    return v.done("20 instances, " + std::to_string(queries) + " queries identical");
}

Outcome metrics_example() {
    Verdict v;
    const auto c = metrics::confusion({0, 0, 1, 1}, {0, 1, 1, 1});
    v.check(metrics::accuracy(c) == 0.75, "accuracy " + fmt(metrics::accuracy(c)));
    v.check(metrics::f1(c) == 0.8, "f1 " + fmt(metrics::f1(c)));
    return v.done("accuracy 0.75, f1 0.8");
}

Outcome pca_properties() {
    Verdict v;
    double ortho = 0.0;
    double round_trip = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const bool wide = seed % 2 == 1;
        const std::size_t n = wide ? 15 : 60;
        const std::size_t d = wide ? 40 : 10;
        const auto x = oracle::gaussian(n, d, seed + 500);
        const auto model = dimred::pca_fit(x, std::min(n - 1, d));
        const auto& w = model.components;
        for (std::size_t i = 0; i < w.rows(); ++i) {
            for (std::size_t j = 0; j < w.rows(); ++j) {
                double dot = 0.0;
                for (std::size_t c = 0; c < w.cols(); ++c) dot += w(i, c) * w(j, c);
                ortho = std::max(ortho, std::abs(dot - (i == j ? 1.0 : 0.0)));
            }
        }
        if (!wide) {
            const auto back = dimred::pca_inverse(dimred::pca_transform(x, model), model);
            for (std::size_t i = 0; i < x.size(); ++i) {
                round_trip = std::max(round_trip, std::abs(back.values()[i] - x.values()[i]));
            }
        }
    }
    v.check(ortho < 1e-8, "orthonormality error " + fmt(ortho));
    v.check(round_trip < 1e-8, "round-trip error " + fmt(round_trip));
    const auto diag = dimred::pca_fit(Matrix::from_rows({{1, 1}, {-1, -1}, {2, 2}, {-2, -2}}), 1);
    const double r = 1.0 / std::sqrt(2.0);
    v.check(std::abs(diag.components(0, 0) - r) < 1e-8 && std::abs(diag.components(0, 1) - r) < 1e-8,
            "diagonal PC1 is not [1/sqrt2, 1/sqrt2]");
    v.check(std::abs(diag.explained_variance[0] - 5.0) < 1e-8,
            "diagonal variance " + fmt(diag.explained_variance[0]));
    return v.done("orthonormality " + fmt(ortho) + ", round trip " + fmt(round_trip) +
                  ", diagonal example exact");
}

Outcome kpca_linear() {
    Verdict v;
    double worst = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        auto x = oracle::gaussian(30, 6, seed + 600);
        for (std::size_t i = 0; i < x.rows(); ++i)
            for (std::size_t j = 0; j < x.cols(); ++j) x(i, j) *= std::pow(0.7, static_cast<double>(j));
        const auto pca = dimred::pca_transform(x, dimred::pca_fit(x, 4));
        const auto kp = dimred::kpca_fit(x, 4, 1.0, dimred::Kernel::linear).fit_projection;
        for (std::size_t c = 0; c < 4; ++c) {
            double same = 0.0;
            double flipped = 0.0;
            for (std::size_t i = 0; i < x.rows(); ++i) {
                same = std::max(same, std::abs(pca(i, c) - kp(i, c)));
                flipped = std::max(flipped, std::abs(pca(i, c) + kp(i, c)));
            }
            worst = std::max(worst, std::min(same, flipped));
        }
    }
    v.check(worst < 1e-6, "max projection difference " + fmt(worst));
    return v.done("max difference up to sign " + fmt(worst));
}

Outcome end_to_end() {
    Verdict v;
    const auto syn = synthetic::make_sparse_linear({kE2eRows, 2048, 100, 0.01, 0.5, kE2eSeed});
    const Dataset data{syn.features, syn.labels};
    pipeline::PipelineConfig cfg;
    cfg.seed = kE2eSeed;
    cfg.selector.kind = pipeline::SelectorKind::none;
    const double baseline = *pipeline::run_pipeline(data, cfg).report.accuracy;
    cfg.selector.kind = pipeline::SelectorKind::lasso;
    cfg.selector.lambda = kE2eLambda;
    const auto lasso = pipeline::run_pipeline(data, cfg).report;
    const double share = static_cast<double>(lasso.selected_features) / 2048.0;
    v.check(*lasso.accuracy >= baseline - 0.02,
            "lasso accuracy " + fmt(*lasso.accuracy) + " vs baseline " + fmt(baseline));
    v.check(share < 0.30, "selected share " + fmt(share));
    return v.done("lasso accuracy " + fmt(*lasso.accuracy) + " vs baseline " + fmt(baseline) +
                  ", selected " + std::to_string(lasso.selected_features) + " of 2048");
}

Outcome leakage() {
    Verdict v;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        auto syn = synthetic::make_sparse_linear({150, 60, 6, 0.01, 0.3, seed});
        Dataset data{syn.features, syn.labels};
        pipeline::PipelineConfig cfg;
        cfg.seed = seed;
        cfg.oversample = true;
        cfg.selector.lambda = 0.02;
        const auto base = pipeline::run_pipeline(data, cfg);
        for (auto i : base.split.test) {
            for (std::size_t j = 0; j < data.features.cols(); ++j) {
                data.features(i, j) = -3.0 * data.features(i, j) + 100.0;
            }
        }
        const auto after = pipeline::run_pipeline(data, cfg);
        const std::string tag = "seed " + std::to_string(seed) + ": ";
        v.check(after.standardizer.means == base.standardizer.means &&
                    after.standardizer.stds == base.standardizer.stds,
                tag + "standardizer changed");
        v.check(after.mask->selected == base.mask->selected, tag + "mask changed");
        v.check(after.coefficients->coef == base.coefficients->coef, tag + "coefficients changed");
        v.check(after.coefficients->intercept == base.coefficients->intercept,
                tag + "intercept changed");
    }
    return v.done("5 seeds with oversampling: statistics, masks, coefficients unchanged");
}

struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"closed-form univariate lasso", 1.0, closed_form_lasso},
        {"cd / ista / fista objective agreement", 30.0, solver_agreement},
        {"lasso KKT optimality", 60.0, kkt},
        {"elastic net reduces to lasso and OLS", 60.0, enet_reduction},
        {"gradient matches finite differences", 10.0, gradient_check},
        {"exact sparse support recovery", 60.0, sparse_recovery},
        {"knn equals brute-force oracle", 30.0, knn_oracle},
        {"metrics hand example", 1.0, metrics_example},
        {"pca orthonormality, round trip, diagonal example", 10.0, pca_properties},
        {"linear-kernel kpca equals pca up to sign", 10.0, kpca_linear},
        {"end-to-end lasso vs no-selection baseline", 120.0, end_to_end},
        {"no test-set leakage into fitted state", 60.0, leakage},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("threw: ") + e.what()};
        }
        const double secs =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (o.pass && secs >= c.budget_seconds) {
            o = {false, "took " + fmt(secs) + " s, budget " + fmt(c.budget_seconds) + " s"};
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s  %s: %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.c_str(),
                    secs);
    }
    std::printf("%zu criteria, %d failed\n", criteria.size(), failures);
    return failures == 0 ? 0 : 1;
}
