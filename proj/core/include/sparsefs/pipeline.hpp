#pragma once

// Config-driven run: load -> label -> split -> oversample (train only) ->
// standardize (fit on train) -> select -> KNN -> evaluate.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sparsefs/error.hpp"
#include "sparsefs/matrix.hpp"
#include "sparsefs/metrics.hpp"
#include "sparsefs/preprocess.hpp"
#include "sparsefs/sparse.hpp"

namespace sparsefs::pipeline {

[[nodiscard]] std::string_view version() noexcept;

/// Environment variable naming the output directory when the config omits it.
inline constexpr const char* kOutputDirEnv = "SPARSEFS_OUTPUT_DIR";
inline constexpr const char* kDefaultOutputDir = "sparsefs-out";

enum class SelectorKind { lasso, enet, pgd, pca, kpca, none };
enum class PgdAlgo { ista, fista };

struct SelectorConfig {
    SelectorKind kind = SelectorKind::lasso;
    double lambda = 0.01;
    sparse::ElasticNetParams enet{};
    PgdAlgo algo = PgdAlgo::ista;
    sparse::SolverConfig solver{};
    double zero_tol = sparse::kDefaultZeroTol;
    std::size_t components = 50;
    /// Kernel width; 1/d when unset.
    std::optional<double> gamma;
};

struct PipelineConfig {
    std::filesystem::path features;
    bool features_has_header = false;
    std::optional<std::filesystem::path> labels;
    std::optional<std::filesystem::path> annotation_manifest;
    std::optional<std::filesystem::path> annotation_dir;
    std::uint64_t seed = 42;
    double train_fraction = 0.8;
    bool stratified = true;
    bool oversample = false;
    double standardize_epsilon = preprocess::kDefaultEpsilon;
    SelectorConfig selector{};
    std::size_t knn_k = 5;
    std::optional<sparse::GridShape> relevance_shape;
    std::filesystem::path output_dir;

    /// Checks value ranges and that every referenced input path exists.
    void validate() const;
};

/// Missing keys take the defaults above; an absent output_dir falls back to
/// $SPARSEFS_OUTPUT_DIR, then "sparsefs-out". Unknown keys are rejected.
[[nodiscard]] PipelineConfig config_from_json(std::string_view text);
/// Fully populated config, defaults included.
[[nodiscard]] std::string config_to_json(const PipelineConfig& cfg);
[[nodiscard]] std::string describe_defaults();

[[nodiscard]] std::string_view to_string(SelectorKind kind) noexcept;
[[nodiscard]] SelectorKind parse_selector(std::string_view text);

struct StageTiming {
    std::string stage;
    double millis = 0.0;
};

struct RunReport {
    std::string config_json;
    std::vector<StageTiming> timings;
    std::size_t input_features = 0;
    std::size_t selected_features = 0;
    std::size_t train_rows = 0;
    std::size_t train_rows_balanced = 0;
    std::size_t test_rows = 0;
    std::optional<std::size_t> solver_iterations;
    std::optional<double> final_objective;
    std::optional<bool> solver_converged;
    std::optional<metrics::ConfusionMatrix> confusion;
    std::optional<double> accuracy;
    std::optional<double> precision;
    std::optional<double> recall;
    std::optional<double> f1;
    std::vector<std::string> warnings;
    std::string tool_version;

    /// Pretty-printed JSON; `timings_ms` is the only run-dependent member.
    [[nodiscard]] std::string to_json() const;
};

struct RunResult {
    RunReport report;
    preprocess::StandardizationStats standardizer;
    std::optional<sparse::CoefficientVector> coefficients;
    std::optional<FeatureMask> mask;
    preprocess::SplitIndices split;
    LabelVector predictions;
};

/// A stage failed. `io_failure` separates file/format problems from
/// contract violations.
class PipelineError : public Error {
public:
    PipelineError(std::string stage, const std::string& cause, bool io_failure);

    [[nodiscard]] const std::string& stage() const noexcept { return stage_; }
    [[nodiscard]] bool io_failure() const noexcept { return io_failure_; }

private:
    std::string stage_;
    bool io_failure_;
};

/// Loads inputs named by `cfg`, runs, and writes artifacts to cfg.output_dir.
[[nodiscard]] RunResult run_pipeline(const PipelineConfig& cfg);

/// Runs on an in-memory dataset. Artifacts are written only when
/// cfg.output_dir is non-empty; on failure the ones already written are removed.
[[nodiscard]] RunResult run_pipeline(const Dataset& data, const PipelineConfig& cfg);

}  // namespace sparsefs::pipeline
