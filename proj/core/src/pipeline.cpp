#include "sparsefs/pipeline.hpp"

#include <chrono>
#include <cstdlib>
#include <set>
#include <type_traits>

#include <json.hpp>

#include "sparsefs/dimred.hpp"
#include "sparsefs/neighbors.hpp"
#include "sparsefs/tensorio.hpp"
#include "sparsefs/yolo.hpp"

#ifndef SPARSEFS_VERSION
#define SPARSEFS_VERSION "0.0.0"
#endif

namespace sparsefs::pipeline {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

void reject_unknown(const Json& obj, const std::set<std::string>& allowed, const char* where) {
    if (!obj.is_object()) {
        throw ContractError(std::string("config: '") + where + "' must be a JSON object");
    }
    for (const auto& [key, value] : obj.items()) {
        if (!allowed.contains(key)) {
            throw ContractError(std::string("config: unknown key '") + key + "' in " + where);
        }
    }
}

template <typename T>
void read(const Json& obj, const char* key, T& out) {
    if (auto it = obj.find(key); it != obj.end() && !it->is_null()) {
        try {
            out = it->template get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ContractError(std::string("config: bad value for '") + key + "': " + e.what());
        }
    }
}

void read_path(const Json& obj, const char* key, std::optional<fs::path>& out) {
    std::string s;
    read(obj, key, s);
    if (!s.empty()) {
        out = s;
    }
}

std::string_view to_string(PgdAlgo algo) noexcept {
    return algo == PgdAlgo::ista ? "ista" : "fista";
}

std::string_view to_string(sparse::StepPolicy::Kind kind) noexcept {
    switch (kind) {
        case sparse::StepPolicy::Kind::fixed:
            return "fixed";
        case sparse::StepPolicy::Kind::lipschitz:
            return "lipschitz";
        case sparse::StepPolicy::Kind::backtracking:
            return "backtracking";
    }
    return "lipschitz";
}

sparse::StepPolicy::Kind parse_step(std::string_view s) {
    if (s == "fixed") {
        return sparse::StepPolicy::Kind::fixed;
    }
    if (s == "lipschitz") {
        return sparse::StepPolicy::Kind::lipschitz;
    }
    if (s == "backtracking") {
        return sparse::StepPolicy::Kind::backtracking;
    }
    throw ContractError("config: unknown step policy '" + std::string(s) + "'");
}

Json config_json(const PipelineConfig& cfg) {
    Json j;
    j["features"] = cfg.features.string();
    j["features_has_header"] = cfg.features_has_header;
    j["labels"] = cfg.labels ? Json(cfg.labels->string()) : Json(nullptr);
    j["annotation_manifest"] =
        cfg.annotation_manifest ? Json(cfg.annotation_manifest->string()) : Json(nullptr);
    j["annotation_dir"] = cfg.annotation_dir ? Json(cfg.annotation_dir->string()) : Json(nullptr);
    j["seed"] = cfg.seed;
    j["split"] = {{"train_fraction", cfg.train_fraction}, {"stratified", cfg.stratified}};
    j["oversample"] = cfg.oversample;
    j["standardize"] = {{"epsilon", cfg.standardize_epsilon}};
    const auto& s = cfg.selector;
    Json sel;
    sel["kind"] = std::string(to_string(s.kind));
    sel["lambda"] = s.lambda;
    sel["alpha"] = s.enet.alpha;
    sel["l1_ratio"] = s.enet.l1_ratio;
    sel["algo"] = std::string(to_string(s.algo));
    sel["tol"] = s.solver.tol;
    sel["max_iter"] = s.solver.max_iter;
    sel["scale_mode"] = std::string(sparse::to_string(s.solver.scale));
    sel["step"] = std::string(to_string(s.solver.step.kind));
    sel["step_size"] = s.solver.step.step;
    sel["shrink"] = s.solver.step.shrink;
    sel["zero_tol"] = s.zero_tol;
    sel["components"] = s.components;
    sel["gamma"] = s.gamma ? Json(*s.gamma) : Json(nullptr);
    j["selector"] = sel;
    j["knn"] = {{"k", cfg.knn_k}};
    if (cfg.relevance_shape) {
        const auto& g = *cfg.relevance_shape;
        j["relevance_shape"] = {g.height, g.width, g.channels};
    } else {
        j["relevance_shape"] = nullptr;
    }
    j["output_dir"] = cfg.output_dir.string();
    return j;
}

double millis_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
        .count();
}

// Runs one stage, timing it and translating library errors into PipelineError.
template <typename F>
auto run_stage(const char* name, std::vector<StageTiming>& timings, F&& body) {
    const auto start = std::chrono::steady_clock::now();
    try {
        if constexpr (std::is_void_v<std::invoke_result_t<F>>) {
            body();
            timings.push_back({name, millis_since(start)});
        } else {
            auto result = body();
            timings.push_back({name, millis_since(start)});
            return result;
        }
    } catch (const PipelineError&) {
        throw;
    } catch (const FormatError& e) {
        throw PipelineError(name, e.what(), true);
    } catch (const IoError& e) {
        throw PipelineError(name, e.what(), true);
    } catch (const Error& e) {
        throw PipelineError(name, e.what(), false);
    } catch (const fs::filesystem_error& e) {
        throw PipelineError(name, e.what(), true);
    }
}

// Tracks written files so a failed run leaves nothing behind.
class Artifacts {
public:
    explicit Artifacts(fs::path dir) : dir_(std::move(dir)) {}

    [[nodiscard]] bool enabled() const { return !dir_.empty(); }

    fs::path claim(const std::string& name) {
        if (!created_checked_) {
            created_dir_ = !fs::exists(dir_);
            fs::create_directories(dir_);
            created_checked_ = true;
        }
        auto p = dir_ / name;
        // Never roll back something this run did not create, such as a directory.
        if (!fs::exists(p) || fs::is_regular_file(p)) {
            written_.push_back(p);
        }
        return p;
    }

    void rollback() noexcept {
        std::error_code ec;
        for (const auto& p : written_) {
            fs::remove(p, ec);
        }
        if (created_dir_) {
            fs::remove(dir_, ec);
        }
    }

private:
    fs::path dir_;
    std::vector<fs::path> written_;
    bool created_checked_ = false;
    bool created_dir_ = false;
};

RunResult execute(const Dataset& data, const PipelineConfig& cfg,
                  std::vector<StageTiming> timings, std::vector<std::string> warnings,
                  Artifacts& out) {
    RunResult result;
    auto& report = result.report;
    report.tool_version = std::string(version());
    report.config_json = config_to_json(cfg);
    report.warnings = std::move(warnings);
    report.input_features = data.features.cols();

    run_stage("validate", timings, [&] {
        data.validate();
        if (!data.features.all_finite()) {
            throw ValidationError("feature matrix holds non-finite values");
        }
    });

    Dataset train;
    Dataset test;
    run_stage("split", timings, [&] {
        result.split = preprocess::split_indices(
            data.labels, {cfg.train_fraction, cfg.seed, cfg.stratified});
        train = take(data, result.split.train);
        test = take(data, result.split.test);
    });
    report.train_rows = train.size();
    report.test_rows = test.size();

    if (cfg.oversample) {
        run_stage("oversample", timings,
                  [&] { train = preprocess::random_oversample(train, cfg.seed); });
    }
    report.train_rows_balanced = train.size();

    Matrix train_x;
    Matrix test_x;
    run_stage("standardize", timings, [&] {
        result.standardizer = preprocess::fit_standardizer(train.features, cfg.standardize_epsilon);
        train_x = preprocess::apply_standardizer(train.features, result.standardizer);
        test_x = preprocess::apply_standardizer(test.features, result.standardizer);
    });

    const auto& sel = cfg.selector;
    run_stage("select", timings, [&] {
        auto solver = sel.solver;
        solver.center_targets = true;
        const Vector targets = sparse::to_targets(train.labels);
        std::optional<sparse::CoefficientVector> coef;
        switch (sel.kind) {
            case SelectorKind::lasso:
                coef = sparse::lasso_cd(train_x, targets, sel.lambda, solver);
                break;
            case SelectorKind::enet:
                coef = sparse::elastic_net_cd(train_x, targets, sel.enet, solver);
                break;
            case SelectorKind::pgd:
                coef = sel.algo == PgdAlgo::ista
                           ? sparse::ista(train_x, targets, sel.lambda, solver)
                           : sparse::fista(train_x, targets, sel.lambda, solver);
                break;
            case SelectorKind::pca: {
                const auto model = dimred::pca_fit(train_x, sel.components);
                train_x = dimred::pca_transform(train_x, model);
                test_x = dimred::pca_transform(test_x, model);
                break;
            }
            case SelectorKind::kpca: {
                const double gamma = sel.gamma.value_or(dimred::default_gamma(train_x.cols()));
                auto model = dimred::kpca_fit(train_x, sel.components, gamma);
                for (auto& w : model.warnings) {
                    report.warnings.push_back("kpca: " + w);
                }
                test_x = dimred::kpca_transform(test_x, model);
                train_x = std::move(model.fit_projection);
                break;
            }
            case SelectorKind::none:
                break;
        }
        if (coef) {
            auto mask = sparse::support(*coef, sel.zero_tol);
            report.solver_iterations = coef->iterations;
            report.solver_converged = coef->converged;
            report.final_objective = coef->objective_history.back();
            if (mask.empty()) {
                throw ContractError(
                    "empty feature selection: every coefficient is zero at this regularization");
            }
            if (!coef->converged) {
                report.warnings.push_back("select: solver stopped at max_iter before reaching tol");
            }
            train_x = sparse::select_features(train_x, mask);
            test_x = sparse::select_features(test_x, mask);
            result.mask = std::move(mask);
            result.coefficients = std::move(coef);
        }
    });
    report.selected_features = train_x.cols();

    run_stage("knn", timings, [&] {
        const auto model = neighbors::knn_fit(train_x, train.labels, cfg.knn_k);
        result.predictions = neighbors::knn_predict(model, test_x);
    });

    run_stage("evaluate", timings, [&] {
        const auto c = metrics::confusion(test.labels, result.predictions);
        report.confusion = c;
        report.accuracy = metrics::accuracy(c);
        report.precision = metrics::precision(c);
        report.recall = metrics::recall(c);
        report.f1 = metrics::f1(c);
    });

    if (out.enabled()) {
        run_stage("write", timings, [&] {
            io::save_matrix_bin(preprocess::stats_to_matrix(result.standardizer),
                                out.claim("standardizer.spfm"));
            io::save_labels(result.predictions, out.claim("predictions.txt"));
            if (result.coefficients) {
                const auto& c = *result.coefficients;
                io::save_matrix_bin(Matrix(1, c.coef.size(), c.coef),
                                    out.claim("coefficients.spfm"));
                io::save_mask(*result.mask, out.claim("mask.txt"));
                io::save_matrix_csv(Matrix(c.objective_history.size(), 1, c.objective_history),
                                    out.claim("objective_history.csv"));
                if (cfg.relevance_shape) {
                    io::save_matrix_csv(sparse::relevance_grid(*result.mask, *cfg.relevance_shape),
                                        out.claim("relevance.csv"));
                }
            }
        });
    }
    report.timings = std::move(timings);
    if (out.enabled()) {
        run_stage("report", report.timings,
                  [&] { io::write_text(out.claim("report.json"), report.to_json() + "\n"); });
    }
    return result;
}

}  // namespace

std::string_view version() noexcept {
    return SPARSEFS_VERSION;
}

std::string_view to_string(SelectorKind kind) noexcept {
    switch (kind) {
        case SelectorKind::lasso:
            return "lasso";
        case SelectorKind::enet:
            return "enet";
        case SelectorKind::pgd:
            return "pgd";
        case SelectorKind::pca:
            return "pca";
        case SelectorKind::kpca:
            return "kpca";
        case SelectorKind::none:
            return "none";
    }
    return "none";
}

SelectorKind parse_selector(std::string_view text) {
    for (auto k : {SelectorKind::lasso, SelectorKind::enet, SelectorKind::pgd, SelectorKind::pca,
                   SelectorKind::kpca, SelectorKind::none}) {
        if (to_string(k) == text) {
            return k;
        }
    }
    throw ContractError("unknown selector '" + std::string(text) +
                        "' (expected lasso, enet, pgd, pca, kpca, or none)");
}

void PipelineConfig::validate() const {
    if (features.empty()) {
        throw ContractError("config: 'features' is required");
    }
    if (!fs::exists(features)) {
        throw IoError("config: features file '" + features.string() + "' does not exist");
    }
    const bool from_manifest = annotation_manifest.has_value() || annotation_dir.has_value();
    if (labels.has_value() == from_manifest) {
        throw ContractError(
            "config: give exactly one label source, 'labels' or "
            "'annotation_manifest' with 'annotation_dir'");
    }
    if (labels && !fs::exists(*labels)) {
        throw IoError("config: labels file '" + labels->string() + "' does not exist");
    }
    if (from_manifest) {
        if (!annotation_manifest || !annotation_dir) {
            throw ContractError("config: 'annotation_manifest' and 'annotation_dir' go together");
        }
        if (!fs::exists(*annotation_manifest)) {
            throw IoError("config: manifest '" + annotation_manifest->string() +
                          "' does not exist");
        }
        if (!fs::is_directory(*annotation_dir)) {
            throw IoError("config: annotation directory '" + annotation_dir->string() +
                          "' does not exist");
        }
    }
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ContractError("config: split.train_fraction must lie strictly between 0 and 1");
    }
    if (!(standardize_epsilon > 0.0)) {
        throw ContractError("config: standardize.epsilon must be positive");
    }
    if (knn_k == 0) {
        throw ContractError("config: knn.k must be at least 1");
    }
    selector.solver.validate();
    if (selector.kind == SelectorKind::enet) {
        selector.enet.validate();
    }
    if (!(selector.lambda >= 0.0)) {
        throw ContractError("config: selector.lambda must be non-negative");
    }
    if ((selector.kind == SelectorKind::pca || selector.kind == SelectorKind::kpca) &&
        selector.components == 0) {
        throw ContractError("config: selector.components must be at least 1");
    }
    if (selector.gamma && !(*selector.gamma > 0.0)) {
        throw ContractError("config: selector.gamma must be positive");
    }
}

PipelineConfig config_from_json(std::string_view text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(std::string("config is not valid JSON: ") + e.what(), 0);
    }
    reject_unknown(j,
                   {"features", "features_has_header", "labels", "annotation_manifest",
                    "annotation_dir", "seed", "split", "oversample", "standardize", "selector",
                    "knn", "relevance_shape", "output_dir"},
                   "config");
    PipelineConfig cfg;
    std::string features;
    read(j, "features", features);
    cfg.features = features;
    read(j, "features_has_header", cfg.features_has_header);
    read_path(j, "labels", cfg.labels);
    read_path(j, "annotation_manifest", cfg.annotation_manifest);
    read_path(j, "annotation_dir", cfg.annotation_dir);
    read(j, "seed", cfg.seed);
    read(j, "oversample", cfg.oversample);
    if (auto it = j.find("split"); it != j.end()) {
        reject_unknown(*it, {"train_fraction", "stratified"}, "split");
        read(*it, "train_fraction", cfg.train_fraction);
        read(*it, "stratified", cfg.stratified);
    }
    if (auto it = j.find("standardize"); it != j.end()) {
        reject_unknown(*it, {"epsilon"}, "standardize");
        read(*it, "epsilon", cfg.standardize_epsilon);
    }
    if (auto it = j.find("knn"); it != j.end()) {
        reject_unknown(*it, {"k"}, "knn");
        read(*it, "k", cfg.knn_k);
    }
    if (auto it = j.find("selector"); it != j.end()) {
        const auto& s = *it;
        reject_unknown(s,
                       {"kind", "lambda", "alpha", "l1_ratio", "algo", "tol", "max_iter",
                        "scale_mode", "step", "step_size", "shrink", "zero_tol", "components",
                        "gamma"},
                       "selector");
        auto& sel = cfg.selector;
        std::string kind = "lasso";
        read(s, "kind", kind);
        sel.kind = parse_selector(kind);
        read(s, "lambda", sel.lambda);
        read(s, "alpha", sel.enet.alpha);
        read(s, "l1_ratio", sel.enet.l1_ratio);
        std::string algo = "ista";
        read(s, "algo", algo);
        if (algo != "ista" && algo != "fista") {
            throw ContractError("config: selector.algo must be ista or fista");
        }
        sel.algo = algo == "ista" ? PgdAlgo::ista : PgdAlgo::fista;
        read(s, "tol", sel.solver.tol);
        read(s, "max_iter", sel.solver.max_iter);
        std::string scale = "mean";
        read(s, "scale_mode", scale);
        sel.solver.scale = sparse::parse_scale_mode(scale);
        std::string step = "lipschitz";
        read(s, "step", step);
        sel.solver.step.kind = parse_step(step);
        read(s, "step_size", sel.solver.step.step);
        read(s, "shrink", sel.solver.step.shrink);
        read(s, "zero_tol", sel.zero_tol);
        read(s, "components", sel.components);
        double gamma = 0.0;
        read(s, "gamma", gamma);
        if (s.contains("gamma") && !s["gamma"].is_null()) {
            sel.gamma = gamma;
        }
    }
    if (auto it = j.find("relevance_shape"); it != j.end() && !it->is_null()) {
        if (!it->is_array() || it->size() != 3) {
            throw ContractError("config: relevance_shape must be [height, width, channels]");
        }
        cfg.relevance_shape = sparse::GridShape{(*it)[0].get<std::size_t>(),
                                                (*it)[1].get<std::size_t>(),
                                                (*it)[2].get<std::size_t>()};
    }
    std::string output_dir;
    read(j, "output_dir", output_dir);
    if (output_dir.empty()) {
        const char* env = std::getenv(kOutputDirEnv);
        output_dir = env != nullptr && *env != '\0' ? env : kDefaultOutputDir;
    }
    cfg.output_dir = output_dir;
    return cfg;
}

std::string config_to_json(const PipelineConfig& cfg) {
    return config_json(cfg).dump(2);
}

std::string describe_defaults() {
    PipelineConfig cfg;
    cfg.features = "<required>";
    cfg.labels = "<labels file, or annotation_manifest + annotation_dir>";
    cfg.output_dir = std::string("$") + kOutputDirEnv + " or " + kDefaultOutputDir;
    return config_to_json(cfg);
}

std::string RunReport::to_json() const {
    Json j;
    j["tool_version"] = tool_version;
    j["config"] = Json::parse(config_json);
    j["features"] = {{"input", input_features}, {"selected", selected_features}};
    j["rows"] = {{"train", train_rows}, {"train_balanced", train_rows_balanced}, {"test", test_rows}};
    if (solver_iterations) {
        j["solver"] = {{"iterations", *solver_iterations},
                       {"final_objective", final_objective.value_or(0.0)},
                       {"converged", solver_converged.value_or(false)}};
    }
    if (confusion) {
        j["confusion"] = {{"tp", confusion->tp}, {"fp", confusion->fp}, {"fn", confusion->fn},
                          {"tn", confusion->tn}};
        j["metrics"] = {{"accuracy", accuracy.value_or(0.0)},
                        {"precision", precision.value_or(0.0)},
                        {"recall", recall.value_or(0.0)},
                        {"f1", f1.value_or(0.0)}};
    }
    j["warnings"] = warnings;
    Json t = Json::object();
    for (const auto& s : timings) {
        t[s.stage] = s.millis;
    }
    j["timings_ms"] = t;
    return j.dump(2);
}

PipelineError::PipelineError(std::string stage, const std::string& cause, bool io_failure)
    : Error(stage + ": " + cause), stage_(std::move(stage)), io_failure_(io_failure) {}

RunResult run_pipeline(const PipelineConfig& cfg) {
    std::vector<StageTiming> timings;
    std::vector<std::string> warnings;
    run_stage("config", timings, [&] { cfg.validate(); });
    Dataset data;
    run_stage("load", timings,
              [&] { data.features = io::load_matrix(cfg.features, cfg.features_has_header); });
    run_stage("labels", timings, [&] {
        if (cfg.labels) {
            data.labels = io::load_labels(*cfg.labels);
        } else {
            auto derived = yolo::labels_from_manifest(*cfg.annotation_manifest, *cfg.annotation_dir);
            for (const auto& stem : derived.missing) {
                warnings.push_back("labels: no annotation for '" + stem + "', labeled 0");
            }
            data.labels = std::move(derived.labels);
        }
    });
    Artifacts out(cfg.output_dir);
    try {
        return execute(data, cfg, std::move(timings), std::move(warnings), out);
    } catch (...) {
        out.rollback();
        throw;
    }
}

RunResult run_pipeline(const Dataset& data, const PipelineConfig& cfg) {
    Artifacts out(cfg.output_dir);
    try {
        return execute(data, cfg, {}, {}, out);
    } catch (...) {
        out.rollback();
        throw;
    }
}

}  // namespace sparsefs::pipeline
