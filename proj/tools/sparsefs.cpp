#include <CLI11.hpp>

#include <memory>
#include <filesystem>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sparsefs/dimred.hpp"
#include "sparsefs/error.hpp"
#include "sparsefs/metrics.hpp"
#include "sparsefs/neighbors.hpp"
#include "sparsefs/pipeline.hpp"
#include "sparsefs/preprocess.hpp"
#include "sparsefs/sparse.hpp"
#include "sparsefs/synthetic.hpp"
#include "sparsefs/tensorio.hpp"
#include "sparsefs/yolo.hpp"

namespace fs = std::filesystem;
using namespace sparsefs;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitContract = 1;
constexpr int kExitIo = 2;

struct Command {
    CLI::App* app;
    std::function<void()> run;
};

// Inputs shared by lasso, enet and pgd.
struct SolverArgs {
    std::string features;
    bool has_header = false;
    std::string labels;
    std::string targets;
    double tol = 1e-6;
    std::size_t max_iter = 1000;
    std::string scale = "mean";
    double zero_tol = sparse::kDefaultZeroTol;
    bool no_center = false;
    std::string out_coef;
    std::string out_mask;
    std::string out_history;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--features", features, "Feature matrix (.csv or SPFM)")->required();
        cmd->add_flag("--header", has_header, "CSV feature file has a header row");
        auto* l = cmd->add_option("--labels", labels, "Label file; labels are used as targets");
        auto* t = cmd->add_option("--targets", targets, "Real-valued targets as an n x 1 matrix");
        l->excludes(t);
        cmd->add_option("--tol", tol, "Convergence tolerance");
        cmd->add_option("--max-iter", max_iter, "Iteration cap");
        cmd->add_option("--scale-mode", scale, "Data-term scaling: mean (1/2m) or sum (1/2)")
            ->check(CLI::IsMember({"mean", "sum"}));
        cmd->add_option("--zero-tol", zero_tol, "Coefficients at or below this are unselected");
        cmd->add_flag("--no-center", no_center, "Do not subtract the target mean");
        cmd->add_option("--out-coef", out_coef, "Coefficient output (1 x d matrix)")->required();
        cmd->add_option("--out-mask", out_mask, "Selected feature indices, one per line");
        cmd->add_option("--out-history", out_history, "Objective history CSV");
    }

    [[nodiscard]] Matrix load_x() const { return io::load_matrix(features, has_header); }

    [[nodiscard]] Vector load_y(std::size_t rows) const {
        Vector y;
        if (!labels.empty()) {
            y = sparse::to_targets(io::load_labels(labels));
        } else if (!targets.empty()) {
            const auto t = io::load_matrix(targets);
            if (t.cols() != 1 && t.rows() != 1) {
                throw ValidationError("targets must be a single row or column");
            }
            y.assign(t.values().begin(), t.values().end());
        } else {
            throw ValidationError("one of --labels or --targets is required");
        }
        if (y.size() != rows) {
            throw ValidationError("features have " + std::to_string(rows) + " rows but targets have " +
                                  std::to_string(y.size()));
        }
        return y;
    }

    [[nodiscard]] sparse::SolverConfig config() const {
        sparse::SolverConfig cfg;
        cfg.tol = tol;
        cfg.max_iter = max_iter;
        cfg.scale = sparse::parse_scale_mode(scale);
        cfg.center_targets = !no_center;
        return cfg;
    }

    void write(const sparse::CoefficientVector& c) const {
        const auto mask = sparse::support(c, zero_tol);
        io::save_matrix(Matrix(1, c.coef.size(), c.coef), out_coef);
        if (!out_mask.empty()) {
            io::save_mask(mask, out_mask);
        }
        if (!out_history.empty()) {
            io::save_matrix_csv(Matrix(c.objective_history.size(), 1, c.objective_history),
                                out_history);
        }
        std::cout << "selected " << mask.size() << " of " << c.coef.size() << " features; "
                  << c.iterations << " iterations; "
                  << (c.converged ? "converged" : "stopped at max-iter") << "; objective "
                  << c.objective_history.back() << "\n";
    }
};

Command add_standardize(CLI::App& app) {
    auto* cmd = app.add_subcommand("standardize", "Z-score columns with population statistics");
    struct Args {
        std::string input, output, stats_in, stats_out;
        bool header = false;
        double epsilon = preprocess::kDefaultEpsilon;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("--input", a->input, "Feature matrix")->required();
    cmd->add_flag("--header", a->header, "CSV input has a header row");
    cmd->add_option("--output", a->output, "Standardized matrix")->required();
    auto* in = cmd->add_option("--stats-in", a->stats_in, "Apply saved 2 x d statistics instead of fitting");
    cmd->add_option("--stats-out", a->stats_out, "Write fitted 2 x d statistics (means, stds)")
        ->excludes(in);
    cmd->add_option("--epsilon", a->epsilon, "Floor for the standard deviation divisor");
    return {cmd, [a] {
                const auto x = io::load_matrix(a->input, a->header);
                const auto stats = a->stats_in.empty()
                                       ? preprocess::fit_standardizer(x, a->epsilon)
                                       : preprocess::stats_from_matrix(io::load_matrix(a->stats_in),
                                                                       a->epsilon);
                io::save_matrix(preprocess::apply_standardizer(x, stats), a->output);
                if (!a->stats_out.empty()) {
                    io::save_matrix(preprocess::stats_to_matrix(stats), a->stats_out);
                }
            }};
}

Command add_oversample(CLI::App& app) {
    auto* cmd = app.add_subcommand("oversample", "Duplicate minority-class rows up to the majority count");
    struct Args {
        std::string features, labels, out_features, out_labels;
        bool header = false;
        std::uint64_t seed = 42;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("--features", a->features, "Feature matrix")->required();
    cmd->add_flag("--header", a->header, "CSV input has a header row");
    cmd->add_option("--labels", a->labels, "Label file")->required();
    cmd->add_option("--seed", a->seed, "Sampling seed");
    cmd->add_option("--out-features", a->out_features, "Balanced feature matrix")->required();
    cmd->add_option("--out-labels", a->out_labels, "Balanced labels")->required();
    return {cmd, [a] {
                const Dataset d{io::load_matrix(a->features, a->header), io::load_labels(a->labels)};
                const auto out = preprocess::random_oversample(d, a->seed);
                io::save_matrix(out.features, a->out_features);
                io::save_labels(out.labels, a->out_labels);
                std::cout << d.size() << " rows -> " << out.size() << " rows\n";
            }};
}

Command add_split(CLI::App& app) {
    auto* cmd = app.add_subcommand("split", "Seeded train/test split");
    struct Args {
        std::string labels, features, out_dir;
        bool header = false;
        bool no_stratify = false;
        double train_fraction = 0.8;
        std::uint64_t seed = 42;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("--labels", a->labels, "Label file")->required();
    cmd->add_option("--features", a->features, "Also split this feature matrix");
    cmd->add_flag("--header", a->header, "CSV input has a header row");
    cmd->add_option("--train-fraction", a->train_fraction, "Share of rows in the training side");
    cmd->add_option("--seed", a->seed, "Shuffle seed");
    cmd->add_flag("--no-stratify", a->no_stratify, "Shuffle all rows together instead of per class");
    cmd->add_option("--out-dir", a->out_dir,
                    "Receives train_indices.txt, test_indices.txt and, with --features, "
                    "train/test features (SPFM) and labels")
        ->required();
    return {cmd, [a] {
                const auto labels = io::load_labels(a->labels);
                const auto split = preprocess::split_indices(
                    labels, {a->train_fraction, a->seed, !a->no_stratify});
                const fs::path dir = a->out_dir;
                fs::create_directories(dir);
                auto save_indices = [](const std::vector<std::size_t>& idx, const fs::path& p) {
                    std::string text;
                    for (auto i : idx) {
                        text += std::to_string(i) + "\n";
                    }
                    io::write_text(p, text);
                };
                save_indices(split.train, dir / "train_indices.txt");
                save_indices(split.test, dir / "test_indices.txt");
                if (!a->features.empty()) {
                    const Dataset d{io::load_matrix(a->features, a->header), labels};
                    const auto train = take(d, split.train);
                    const auto test = take(d, split.test);
                    io::save_matrix_bin(train.features, dir / "train_features.spfm");
                    io::save_matrix_bin(test.features, dir / "test_features.spfm");
                    io::save_labels(train.labels, dir / "train_labels.txt");
                    io::save_labels(test.labels, dir / "test_labels.txt");
                }
                std::cout << split.train.size() << " train, " << split.test.size() << " test\n";
            }};
}

Command add_lasso(CLI::App& app) {
    auto* cmd = app.add_subcommand("lasso", "L1-regularized least squares by coordinate descent");
    struct Args : SolverArgs {
        double lambda = 0.01;
    };
    auto a = std::make_shared<Args>();
    a->add_to(cmd);
    cmd->add_option("--lambda", a->lambda, "L1 weight");
    return {cmd, [a] {
                const auto x = a->load_x();
                a->write(sparse::lasso_cd(x, a->load_y(x.rows()), a->lambda, a->config()));
            }};
}

Command add_enet(CLI::App& app) {
    auto* cmd = app.add_subcommand("enet", "Elastic Net by coordinate descent");
    struct Args : SolverArgs {
        double alpha = 0.01;
        double l1_ratio = 0.5;
    };
    auto a = std::make_shared<Args>();
    a->add_to(cmd);
    cmd->add_option("--alpha", a->alpha, "Overall penalty weight");
    cmd->add_option("--l1-ratio", a->l1_ratio, "L1 share of the penalty, in [0, 1]");
    return {cmd, [a] {
                const auto x = a->load_x();
                a->write(sparse::elastic_net_cd(x, a->load_y(x.rows()), {a->alpha, a->l1_ratio},
                                                a->config()));
            }};
}

Command add_pgd(CLI::App& app) {
    auto* cmd = app.add_subcommand("pgd", "Proximal gradient Lasso (ISTA or FISTA)");
    struct Args : SolverArgs {
        double lambda = 0.1;
        std::string algo = "ista";
        std::string step = "lipschitz";
        double step_size = 1.0;
        double shrink = 0.5;
    };
    auto a = std::make_shared<Args>();
    a->add_to(cmd);
    cmd->get_option("--out-history")->required();
    cmd->add_option("--lambda", a->lambda, "L1 weight");
    cmd->add_option("--algo", a->algo, "ista or fista")->check(CLI::IsMember({"ista", "fista"}));
    cmd->add_option("--step", a->step, "Step policy: lipschitz (1/L), fixed, or backtracking")
        ->check(CLI::IsMember({"lipschitz", "fixed", "backtracking"}));
    cmd->add_option("--step-size", a->step_size, "Fixed step, or the initial backtracking step");
    cmd->add_option("--shrink", a->shrink, "Backtracking shrink factor in (0, 1)");
    return {cmd, [a] {
                const auto x = a->load_x();
                auto cfg = a->config();
                if (a->step == "fixed") {
                    cfg.step = sparse::StepPolicy::fixed(a->step_size);
                } else if (a->step == "backtracking") {
                    cfg.step = sparse::StepPolicy::backtracking(a->shrink, a->step_size);
                }
                const auto y = a->load_y(x.rows());
                a->write(a->algo == "ista" ? sparse::ista(x, y, a->lambda, cfg)
                                           : sparse::fista(x, y, a->lambda, cfg));
            }};
}

Command add_pca(CLI::App& app) {
    auto* cmd = app.add_subcommand("pca", "Principal component analysis");
    struct Args {
        std::string features, model_in, model_out, out;
        bool header = false;
        std::size_t components = 50;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("--features", a->features, "Feature matrix")->required();
    cmd->add_flag("--header", a->header, "CSV input has a header row");
    cmd->add_option("--components", a->components, "Number of components k");
    auto* in = cmd->add_option("--model", a->model_in, "Transform with a saved model directory");
    cmd->add_option("--model-out", a->model_out, "Save the fitted model to this directory")->excludes(in);
    cmd->add_option("--out", a->out, "Projected n x k matrix");
    return {cmd, [a] {
                const auto x = io::load_matrix(a->features, a->header);
                const auto model =
                    a->model_in.empty() ? dimred::pca_fit(x, a->components) : dimred::load_pca(a->model_in);
                if (!a->model_out.empty()) {
                    dimred::save_pca(model, a->model_out);
                }
                if (!a->out.empty()) {
                    io::save_matrix(dimred::pca_transform(x, model), a->out);
                }
                std::cout << "explained variance:";
                for (double v : model.explained_variance) {
                    std::cout << ' ' << v;
                }
                std::cout << "\n";
            }};
}

Command add_kpca(CLI::App& app) {
    auto* cmd = app.add_subcommand("kpca", "Kernel PCA with an RBF kernel");
    struct Args {
        std::string features, model_in, model_out, out, kernel = "rbf";
        bool header = false;
        std::size_t components = 50;
        std::optional<double> gamma;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("--features", a->features, "Feature matrix")->required();
    cmd->add_flag("--header", a->header, "CSV input has a header row");
    cmd->add_option("--components", a->components, "Number of components k");
    cmd->add_option("--gamma", a->gamma, "RBF width; defaults to 1/d");
    cmd->add_option("--kernel", a->kernel, "rbf, or linear for checking against pca")
        ->check(CLI::IsMember({"rbf", "linear"}));
    auto* in = cmd->add_option("--model", a->model_in, "Transform with a saved model directory");
    cmd->add_option("--model-out", a->model_out, "Save the fitted model to this directory")->excludes(in);
    cmd->add_option("--out", a->out, "Projected n x k matrix");
    return {cmd, [a] {
                const auto x = io::load_matrix(a->features, a->header);
                Matrix projected;
                dimred::KpcaModel model;
                if (a->model_in.empty()) {
                    const auto kernel = a->kernel == "rbf" ? dimred::Kernel::rbf : dimred::Kernel::linear;
                    model = dimred::kpca_fit(x, a->components,
                                             a->gamma.value_or(dimred::default_gamma(x.cols())), kernel);
                    projected = model.fit_projection;
                } else {
                    model = dimred::load_kpca(a->model_in);
                    projected = dimred::kpca_transform(x, model);
                }
                for (const auto& w : model.warnings) {
                    std::cerr << "warning: " << w << "\n";
                }
                if (!a->model_out.empty()) {
                    dimred::save_kpca(model, a->model_out);
                }
                if (!a->out.empty()) {
                    io::save_matrix(projected, a->out);
                }
                std::cout << model.n_components() << " components\n";
            }};
}

Command add_knn(CLI::App& app) {
    auto* cmd = app.add_subcommand("knn", "k-nearest-neighbors classification");
    struct Args {
        std::string train_features, train_labels, test_features, out;
        std::size_t k = neighbors::kDefaultK;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("--train-features", a->train_features, "Training matrix")->required();
    cmd->add_option("--train-labels", a->train_labels, "Training labels")->required();
    cmd->add_option("--test-features", a->test_features, "Query matrix")->required();
    cmd->add_option("--k", a->k, "Number of neighbors");
    cmd->add_option("--out", a->out, "Predicted labels")->required();
    return {cmd, [a] {
                const auto model = neighbors::knn_fit(io::load_matrix(a->train_features),
                                                      io::load_labels(a->train_labels), a->k);
                io::save_labels(neighbors::knn_predict(model, io::load_matrix(a->test_features)),
                                a->out);
            }};
}

Command add_eval(CLI::App& app) {
    auto* cmd = app.add_subcommand("eval", "Binary classification metrics (class 1 positive)");
    struct Args {
        std::string truth, pred, out;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("--truth", a->truth, "True labels")->required();
    cmd->add_option("--pred", a->pred, "Predicted labels")->required();
    cmd->add_option("--out", a->out, "JSON report; printed to stdout when omitted");
    return {cmd, [a] {
                const auto c = metrics::confusion(io::load_labels(a->truth), io::load_labels(a->pred));
                nlohmann::ordered_json j;
                j["confusion"] = {{"tp", c.tp}, {"fp", c.fp}, {"fn", c.fn}, {"tn", c.tn}};
                j["metrics"] = {{"accuracy", metrics::accuracy(c)},
                                {"precision", metrics::precision(c)},
                                {"recall", metrics::recall(c)},
                                {"f1", metrics::f1(c)}};
                const auto text = j.dump(2) + "\n";
                if (a->out.empty()) {
                    std::cout << text;
                } else {
                    io::write_text(a->out, text);
                }
            }};
}

Command add_relevance(CLI::App& app) {
    auto* cmd = app.add_subcommand("relevance", "Count selected features per spatial cell");
    struct Args {
        std::string mask, out;
        std::vector<std::size_t> shape;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("--mask", a->mask, "Selected indices, one per line")->required();
    cmd->add_option("--shape", a->shape, "Feature tensor shape: height width channels")
        ->required()
        ->expected(3);
    cmd->add_option("--out", a->out, "height x width count matrix")->required();
    return {cmd, [a] {
                const sparse::GridShape shape{a->shape[0], a->shape[1], a->shape[2]};
                const auto mask = io::load_mask(a->mask, shape.flat_size());
                io::save_matrix(sparse::relevance_grid(mask, shape), a->out);
            }};
}

Command add_run(CLI::App& app) {
    auto* cmd = app.add_subcommand(
        "run", "Full pipeline from a JSON config. Defaults:\n" + pipeline::describe_defaults());
    struct Args {
        std::string config, output_dir;
        bool print_defaults = false;
    };
    auto a = std::make_shared<Args>();
    auto* cfg_opt = cmd->add_option("--config", a->config, "Pipeline config (JSON)");
    cmd->add_option("--output-dir", a->output_dir, "Overrides the config's output_dir");
    cmd->add_flag("--print-defaults", a->print_defaults, "Print the default config and exit")
        ->excludes(cfg_opt);
    return {cmd, [a] {
                if (a->print_defaults) {
                    std::cout << pipeline::describe_defaults() << "\n";
                    return;
                }
                if (a->config.empty()) {
                    throw ValidationError("--config is required");
                }
                std::string text;
                try {
                    text = io::read_text(a->config);
                } catch (const IoError& e) {
                    throw pipeline::PipelineError("config", e.what(), true);
                }
                pipeline::PipelineConfig cfg;
                try {
                    cfg = pipeline::config_from_json(text);
                } catch (const Error& e) {
                    throw pipeline::PipelineError("config", e.what(), false);
                }
                if (!a->output_dir.empty()) {
                    cfg.output_dir = a->output_dir;
                }
                const auto result = pipeline::run_pipeline(cfg);
                const auto& r = result.report;
                for (const auto& w : r.warnings) {
                    std::cerr << "warning: " << w << "\n";
                }
                std::cout << "features " << r.input_features << " -> " << r.selected_features
                          << "; accuracy " << r.accuracy.value_or(0.0) << "; f1 "
                          << r.f1.value_or(0.0) << "\nartifacts in " << cfg.output_dir.string()
                          << "\n";
            }};
}

Command add_synth(CLI::App& app) {
    auto* cmd = app.add_subcommand("synth", "Generate a seeded sparse linear dataset");
    struct Args {
        synthetic::SyntheticSpec spec;
        std::string out_features, out_labels, out_targets, out_coef;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("--rows", a->spec.n_rows, "Number of rows");
    cmd->add_option("--features", a->spec.n_features, "Number of features");
    cmd->add_option("--informative", a->spec.n_informative, "Nonzero true coefficients");
    cmd->add_option("--noise", a->spec.noise_sigma, "Target noise standard deviation");
    cmd->add_option("--positive-fraction", a->spec.positive_fraction, "Share of rows labeled 1");
    cmd->add_option("--seed", a->spec.seed, "Generator seed");
    cmd->add_option("--out-features", a->out_features, "Feature matrix")->required();
    cmd->add_option("--out-labels", a->out_labels, "Binary labels")->required();
    cmd->add_option("--out-targets", a->out_targets, "Real targets (n x 1)");
    cmd->add_option("--out-coef", a->out_coef, "True coefficients (1 x d)");
    return {cmd, [a] {
                const auto data = synthetic::make_sparse_linear(a->spec);
                io::save_matrix(data.features, a->out_features);
                io::save_labels(data.labels, a->out_labels);
                if (!a->out_targets.empty()) {
                    io::save_matrix(Matrix(data.targets.size(), 1, data.targets), a->out_targets);
                }
                if (!a->out_coef.empty()) {
                    io::save_matrix(Matrix(1, data.true_coef.size(), data.true_coef), a->out_coef);
                }
            }};
}

Command add_derive_labels(CLI::App& app) {
    auto* cmd = app.add_subcommand("derive-labels",
                                   "Image labels from YOLO annotations: 1 if any box, else 0");
    struct Args {
        std::string manifest, annotation_dir, out;
    };
    auto a = std::make_shared<Args>();
    cmd->add_option("--manifest", a->manifest, "One image stem per line")->required();
    cmd->add_option("--annotation-dir", a->annotation_dir, "Directory of <stem>.txt files")->required();
    cmd->add_option("--out", a->out, "Label file in manifest order")->required();
    return {cmd, [a] {
                const auto derived = yolo::labels_from_manifest(a->manifest, a->annotation_dir);
                for (const auto& stem : derived.missing) {
                    std::cerr << "warning: no annotation for '" << stem << "', labeled 0\n";
                }
                io::save_labels(derived.labels, a->out);
            }};
}

int run_guarded(const std::function<void()>& body) {
    try {
        body();
        return kExitOk;
    } catch (const pipeline::PipelineError& e) {
        std::cerr << "error: stage " << e.what() << "\n";
        return e.io_failure() ? kExitIo : kExitContract;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitIo;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitContract;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse-modeling feature selection toolkit", "sparsefs"};
    app.set_version_flag("--version", std::string(pipeline::version()));
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);

    const std::vector<Command> commands{
        add_standardize(app), add_oversample(app), add_split(app), add_lasso(app),
        add_enet(app),        add_pgd(app),        add_pca(app),   add_kpca(app),
        add_knn(app),         add_eval(app),       add_relevance(app), add_run(app),
        add_synth(app),       add_derive_labels(app)};

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitContract;
    }
    for (const auto& c : commands) {
        if (c.app->parsed()) {
            return run_guarded(c.run);
        }
    }
    return kExitContract;
}
