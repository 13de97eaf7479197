#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <string>

#include <json.hpp>

#include "../support/temp_dir.hpp"
#include "sparsefs/sparse.hpp"
#include "sparsefs/tensorio.hpp"

using namespace sparsefs;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    int code;
    std::string out;
};

// Runs the CLI with stdout captured to a file inside `dir`.
Outcome cli(const fs::path& dir, const std::string& args) {
    const auto out = dir / "stdout.txt";
    const std::string cmd = "cd '" + dir.string() + "' && '" SPARSEFS_CLI_PATH "' " + args + " > '" +
                            out.string() + "' 2> '" + (dir / "stderr.txt").string() + "'";
    const int status = std::system(cmd.c_str());
    REQUIRE(WIFEXITED(status));
    return {WEXITSTATUS(status), io::read_text(out)};
}

}  // namespace

TEST_CASE("eval on the hand example reports accuracy 0.75 and f1 0.8") {
    test_support::TempDir dir;
    io::save_labels(LabelVector{0, 0, 1, 1}, dir.path() / "t.txt");
    io::save_labels(LabelVector{0, 1, 1, 1}, dir.path() / "p.txt");
    const auto r = cli(dir.path(), "eval --truth t.txt --pred p.txt --out report.json");
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(io::read_text(dir.path() / "report.json"));
    CHECK(j["metrics"]["accuracy"] == 0.75);
    CHECK(j["metrics"]["f1"] == 0.8);
    CHECK(j["confusion"]["tp"] == 2);
}

TEST_CASE("lasso writes coefficients and a matching mask") {
    test_support::TempDir dir;
    REQUIRE(cli(dir.path(), "synth --rows 120 --features 25 --informative 3 --seed 2 "
                            "--out-features x.spfm --out-labels y.txt")
                .code == 0);
    const auto r = cli(dir.path(), "lasso --features x.spfm --labels y.txt --lambda 0.01 "
                                   "--out-coef coef.spfm --out-mask mask.txt");
    REQUIRE(r.code == 0);
    const auto coef = io::load_matrix_bin(dir.path() / "coef.spfm");
    CHECK(coef.rows() == 1);
    CHECK(coef.cols() == 25);
    CHECK(io::load_mask(dir.path() / "mask.txt", 25).selected ==
          sparse::support(coef.values()).selected);
}

TEST_CASE("pgd writes coefficients and a nonincreasing objective history") {
    test_support::TempDir dir;
    REQUIRE(cli(dir.path(), "synth --rows 80 --features 40 --seed 3 --out-features x.csv "
                            "--out-labels y.txt")
                .code == 0);
    for (const char* algo : {"ista", "fista"}) {
        const auto r = cli(dir.path(), std::string("pgd --features x.csv --labels y.txt --lambda 0.1 "
                                                   "--algo ") +
                                           algo + " --out-coef c.csv --out-history h.csv");
        REQUIRE(r.code == 0);
        const auto h = io::load_matrix_csv(dir.path() / "h.csv");
        CHECK(h.rows() >= 2);
        CHECK(h.cols() == 1);
        if (std::string(algo) == "ista") {
            for (std::size_t i = 1; i < h.rows(); ++i) CHECK(h(i, 0) <= h(i - 1, 0));
        }
    }
}

TEST_CASE("exit codes: 1 for contract errors, 2 for io and format errors") {
    test_support::TempDir dir;
    io::save_labels(LabelVector{0, 1}, dir.path() / "y.txt");
    io::save_matrix_bin(Matrix(2, 2, 1.0), dir.path() / "x.spfm");
    io::write_text(dir.path() / "bad.spfm", "SPFMxx");
    CHECK(cli(dir.path(), "lasso --features missing.spfm --labels y.txt --out-coef c.spfm").code == 2);
    CHECK(cli(dir.path(), "lasso --features bad.spfm --labels y.txt --out-coef c.spfm").code == 2);
    CHECK(cli(dir.path(), "lasso --features x.spfm --labels y.txt --lambda -1 --out-coef c.spfm")
              .code == 1);
    CHECK(cli(dir.path(), "knn --train-features x.spfm --train-labels y.txt --test-features x.spfm "
                          "--k 3 --out p.txt")
              .code == 1);
    CHECK(cli(dir.path(), "lasso --no-such-flag").code == 1);
    CHECK(cli(dir.path(), "").code == 1);
    CHECK(cli(dir.path(), "--help").code == 0);
}

TEST_CASE("help documents defaults") {
    test_support::TempDir dir;
    const auto r = cli(dir.path(), "lasso --help");
    CHECK(r.code == 0);
    CHECK(r.out.find("[0.01]") != std::string::npos);
    const auto d = cli(dir.path(), "run --print-defaults");
    CHECK(d.code == 0);
    const auto j = nlohmann::json::parse(d.out);
    CHECK(j["seed"] == 42);
    CHECK(j["knn"]["k"] == 5);
}

TEST_CASE("run executes a config and writes the report") {
    test_support::TempDir dir;
    REQUIRE(cli(dir.path(), "synth --rows 150 --features 30 --informative 4 --seed 4 "
                            "--out-features x.spfm --out-labels y.txt")
                .code == 0);
    io::write_text(dir.path() / "cfg.json",
                   R"({"features": "x.spfm", "labels": "y.txt", "oversample": true,
                       "selector": {"kind": "lasso", "lambda": 0.01},
                       "relevance_shape": [5, 6, 1], "output_dir": "out"})");
    REQUIRE(cli(dir.path(), "run --config cfg.json").code == 0);
    const auto report = nlohmann::json::parse(io::read_text(dir.path() / "out" / "report.json"));
    CHECK(report["features"]["input"] == 30);
    CHECK(report["metrics"]["accuracy"].get<double>() > 0.5);
    CHECK(fs::exists(dir.path() / "out" / "relevance.csv"));

    io::write_text(dir.path() / "empty.json",
                   R"({"features": "x.spfm", "labels": "y.txt",
                       "selector": {"lambda": 1000}, "output_dir": "out2"})");
    CHECK(cli(dir.path(), "run --config empty.json").code == 1);
    CHECK(io::read_text(dir.path() / "stderr.txt").find("empty feature selection") !=
          std::string::npos);
    CHECK_FALSE(fs::exists(dir.path() / "out2"));
    CHECK(cli(dir.path(), "run --config nowhere.json").code == 2);
}

TEST_CASE("standardize, split, knn and relevance compose") {
    test_support::TempDir dir;
    REQUIRE(cli(dir.path(), "synth --rows 100 --features 8 --seed 5 --out-features x.spfm "
                            "--out-labels y.txt")
                .code == 0);
    REQUIRE(cli(dir.path(), "split --labels y.txt --features x.spfm --out-dir s").code == 0);
    REQUIRE(cli(dir.path(), "standardize --input s/train_features.spfm --output tr.spfm "
                            "--stats-out stats.spfm")
                .code == 0);
    REQUIRE(cli(dir.path(), "standardize --input s/test_features.spfm --output te.spfm "
                            "--stats-in stats.spfm")
                .code == 0);
    REQUIRE(cli(dir.path(), "oversample --features tr.spfm --labels s/train_labels.txt "
                            "--out-features trb.spfm --out-labels trb.txt")
                .code == 0);
    REQUIRE(cli(dir.path(), "knn --train-features trb.spfm --train-labels trb.txt "
                            "--test-features te.spfm --out pred.txt")
                .code == 0);
    CHECK(io::load_labels(dir.path() / "pred.txt").size() == 20);
    io::write_text(dir.path() / "mask.txt", "0\n3\n");
    REQUIRE(cli(dir.path(), "relevance --mask mask.txt --shape 2 2 1 --out grid.csv").code == 0);
    CHECK(io::load_matrix_csv(dir.path() / "grid.csv") == Matrix::from_rows({{1, 0}, {0, 1}}));
    REQUIRE(cli(dir.path(), "pca --features x.spfm --components 3 --out z.csv --model-out pm").code == 0);
    CHECK(io::load_matrix_csv(dir.path() / "z.csv").cols() == 3);
    REQUIRE(cli(dir.path(), "kpca --features x.spfm --components 3 --out k.csv").code == 0);
}

TEST_CASE("derive-labels follows the manifest and labels missing files 0") {
    test_support::TempDir dir;
    fs::create_directories(dir.path() / "ann");
    io::write_text(dir.path() / "ann" / "a.txt", "0 0.5 0.5 0.1 0.1\n");
    io::write_text(dir.path() / "ann" / "b.txt", "");
    io::write_text(dir.path() / "manifest.txt", "a\nb\nc\n");
    REQUIRE(cli(dir.path(), "derive-labels --manifest manifest.txt --annotation-dir ann "
                            "--out labels.txt")
                .code == 0);
    CHECK(io::load_labels(dir.path() / "labels.txt") == LabelVector{1, 0, 0});
    io::write_text(dir.path() / "ann" / "b.txt", "0 0.5 0.5 1.5 0.1\n");
    CHECK(cli(dir.path(), "derive-labels --manifest manifest.txt --annotation-dir ann "
                          "--out labels.txt")
              .code == 2);
}
