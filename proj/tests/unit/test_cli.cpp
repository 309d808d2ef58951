#include "embadapt/cli.hpp"
#include "embadapt/embadapt.hpp"

#include "temp_dir.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <chrono>
#include <fstream>
#include <sstream>

namespace embadapt {
namespace {

namespace fs = std::filesystem;
using testing::TempDir;

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    std::ostringstream out;
    std::ostringstream err;
    const int code = cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines_of(const fs::path& p) {
    std::istringstream in(slurp(p));
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) lines.push_back(line);
    return lines;
}

nlohmann::json read_json(const fs::path& p) { return nlohmann::json::parse(slurp(p)); }

// A small dataset written through the CLI and shared by the tests below.
class CliData : public ::testing::Test {
protected:
    static void SetUpTestSuite() {
        dir_ = new TempDir;
        const auto r = run({"synth", "--n", "300", "--modalities", "2", "--dims", "48,32", "--signal-dims", "8",
                            "--seed", "5", "--out", (dir_->path() / "data").string()});
        ASSERT_EQ(r.code, 0) << r.err;
    }
    static void TearDownTestSuite() {
        delete dir_;
        dir_ = nullptr;
    }
    static std::string manifest() { return (dir_->path() / "data" / "manifest.json").string(); }
    static TempDir* dir_;
};
TempDir* CliData::dir_ = nullptr;

TEST(CliSynth, RepeatRunsProduceIdenticalFiles) {
    TempDir dir;
    const auto a = dir / "a";
    const auto b = dir / "b";
    ASSERT_EQ(run({"synth", "--n", "2000", "--modalities", "2", "--seed", "7", "--out", a.string()}).code, 0);
    ASSERT_EQ(run({"synth", "--n", "2000", "--modalities", "2", "--seed", "7", "--out", b.string()}).code, 0);
    for (const char* name : {"m0.csv", "m1.csv", "labels.csv", "manifest.json"})
        EXPECT_EQ(file_sha256(a / name), file_sha256(b / name)) << name;

    SynthSpec spec;
    spec.n_samples = 2000;
    spec.seed = 7;
    EXPECT_EQ(fingerprint(load_dataset(a / "manifest.json")), fingerprint(generate_synthetic(spec)));
}

TEST(CliSynth, UsageAndOverwriteErrors) {
    TempDir dir;
    EXPECT_EQ(run({"synth", "--n", "0", "--out", (dir / "x").string()}).code, cli::exit_usage);
    EXPECT_EQ(run({"synth", "--n", "20"}).code, cli::exit_usage);
    EXPECT_EQ(run({"synth", "--n", "20", "--dims", "8,8,8", "--out", (dir / "x").string()}).code, cli::exit_usage);
    EXPECT_EQ(run({"synth", "--n", "20", "--nonlinearity", "cubic", "--out", (dir / "x").string()}).code, cli::exit_usage);
    EXPECT_EQ(run({"frobnicate"}).code, cli::exit_usage);
    EXPECT_EQ(run({}).code, cli::exit_usage);

    const auto out = (dir / "y").string();
    ASSERT_EQ(run({"synth", "--n", "20", "--dims", "8", "--signal-dims", "2", "--out", out}).code, 0);
    EXPECT_EQ(run({"synth", "--n", "20", "--dims", "8", "--signal-dims", "2", "--out", out}).code, cli::exit_error);
    EXPECT_EQ(run({"synth", "--n", "20", "--dims", "8", "--signal-dims", "2", "--out", out, "--force"}).code, 0);
}

TEST(CliSynth, RunManifestDescribesTheRun) {
    TempDir dir;
    const auto out = dir / "d";
    ASSERT_EQ(run({"synth", "--n", "30", "--dims", "6,4", "--signal-dims", "2", "--seed", "3", "--out", out.string()}).code, 0);
    const auto m = read_json(out / "run_manifest.json");
    EXPECT_EQ(m["command"], "synth");
    EXPECT_EQ(m["seeds"]["seed"], 3);
    EXPECT_EQ(m["spec"]["dims"], nlohmann::json::array({6, 4}));
    EXPECT_EQ(m["outputs"].size(), 4u);
    EXPECT_EQ(m["dataset_fingerprint"], fingerprint(load_dataset(out / "manifest.json")));
    EXPECT_TRUE(m["wall_seconds"].is_number());
}

TEST(CliHelp, DocumentsDefaults) {
    const auto r = run({"adapt", "--help"});
    EXPECT_EQ(r.code, 0);
    for (const char* needle : {"--lr", "[0.001]", "--batch-size", "[128]", "--epochs", "[10]", "--temperature", "[0.1]",
                               "--hidden-layers", "[1]", "--projection-size", "--self-pairs", "--normalize", "--seed",
                               "--threads", "[8]", "--mode", "--method"})
        EXPECT_NE(r.out.find(needle), std::string::npos) << needle;
    for (const char* cmd : {"synth", "project", "compare", "bench"}) EXPECT_EQ(run({cmd, "--help"}).code, 0) << cmd;
}

TEST_F(CliData, AdaptPerModalityWritesOneHeadPerModality) {
    TempDir dir;
    const auto data = dir / "three";
    ASSERT_EQ(run({"synth", "--n", "80", "--modalities", "3", "--dims", "24", "--signal-dims", "4", "--out", data.string()}).code, 0);
    const auto out = dir / "p";
    const auto r = run({"adapt", "--manifest", (data / "manifest.json").string(), "--mode", "permod", "--projection-size",
                        "8", "--epochs", "2", "--out", out.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    for (int j = 0; j < 3; ++j) {
        EXPECT_TRUE(fs::exists(out / ("head_" + std::to_string(j) + ".txt")));
        EXPECT_EQ(lines_of(out / ("training_log_head" + std::to_string(j) + ".csv")).size(), 3u);
    }
    EXPECT_FALSE(fs::exists(out / "head_3.txt"));
    const auto m = read_json(out / "run_manifest.json");
    EXPECT_EQ(m["seeds"]["head_seeds"], nlohmann::json::array({0, 1, 2}));
    EXPECT_EQ(m["config"]["hidden_width"], 16);
}

TEST_F(CliData, ZeroEpochPipelineEqualsInitialHeads) {
    TempDir dir;
    const auto out = dir / "p";
    ASSERT_EQ(run({"adapt", "--manifest", manifest(), "--mode", "permod", "--projection-size", "8", "--epochs", "0",
                   "--seed", "4", "--out", out.string()})
                  .code,
              0);
    TrainConfig cfg;
    cfg.projection_size = 8;
    cfg.epochs = 0;
    cfg.seed = 4;
    const auto expect_dir = dir / "expect";
    save_pipeline(initial_pipeline(load_dataset(manifest()), ProjectionMode::per_modality, cfg), expect_dir);
    for (const char* name : {"head_0.txt", "head_1.txt", "pipeline.json"})
        EXPECT_EQ(file_sha256(out / name), file_sha256(expect_dir / name)) << name;
}

TEST_F(CliData, PcaMethodAndProject) {
    TempDir dir;
    const auto out = dir / "pca";
    ASSERT_EQ(run({"adapt", "--manifest", manifest(), "--method", "pca", "--mode", "permod", "--projection-size", "5",
                   "--out", out.string()})
                  .code,
              0);
    EXPECT_TRUE(fs::exists(out / "pca_1.txt"));
    const auto csv = dir / "proj.csv";
    const auto r = run({"project", "--pipeline", out.string(), "--manifest", manifest(), "--out", csv.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto projected = read_embeddings_csv(csv);
    EXPECT_EQ(projected.values.rows(), 300);
    EXPECT_EQ(projected.values.cols(), 10);
    EXPECT_TRUE(fs::exists(csv.string() + ".run_manifest.json"));
}

TEST_F(CliData, AdaptRejectsBadValues) {
    TempDir dir;
    const auto out = (dir / "x").string();
    EXPECT_EQ(run({"adapt", "--manifest", manifest(), "--mode", "both", "--out", out}).code, cli::exit_usage);
    EXPECT_EQ(run({"adapt", "--manifest", manifest(), "--temperature", "0", "--out", out}).code, cli::exit_usage);
    EXPECT_EQ(run({"adapt", "--manifest", manifest(), "--mode", "permod", "--projection-size", "40", "--out", out}).code,
              cli::exit_usage);
    EXPECT_EQ(run({"adapt", "--manifest", (dir / "none.json").string(), "--out", out}).code, cli::exit_usage);
}

TEST_F(CliData, CompareSubsetIsDeterministicAndReproducibleFromManifest) {
    TempDir dir;
    const auto csv = dir / "r.csv";
    std::vector<std::string> args{"compare", "--manifest", manifest(), "--arms", "unprojected",
                                  "--classifiers", "logreg,cart", "--folds", "3", "--seed", "2", "--out", csv.string()};
    ASSERT_EQ(run(args).code, 0);
    const auto first = slurp(csv);
    for (const auto& line : lines_of(csv)) {
        if (line.empty() || line == "summary" || line.rfind("arm,", 0) == 0) continue;
        EXPECT_EQ(line.rfind("unprojected,", 0), 0u) << line;
    }
    const auto m = read_json(csv.string() + ".run_manifest.json");
    EXPECT_EQ(m["status"], "ok");
    EXPECT_EQ(m["arms"], nlohmann::json::array({"unprojected"}));
    std::vector<std::string> replay = m["argv"].get<std::vector<std::string>>();
    replay.erase(replay.begin());
    ASSERT_EQ(run(replay).code, 0);
    EXPECT_EQ(slurp(csv), first);
}

TEST_F(CliData, CompareReportsFailedCells) {
    TempDir dir;
    const auto csv = dir / "r.csv";
    const auto r = run({"compare", "--manifest", manifest(), "--arms", "unprojected,pca_permod", "--classifiers", "cart",
                        "--folds", "2", "--projection-size", "40", "--out", csv.string()});
    EXPECT_EQ(r.code, cli::exit_cells_failed);
    const auto failures = nlohmann::json::parse(r.err)["failures"];
    ASSERT_EQ(failures.size(), 2u);
    EXPECT_EQ(failures[0]["arm"], "pca_permod");
    const auto m = read_json(csv.string() + ".run_manifest.json");
    EXPECT_EQ(m["status"], "failed");
    EXPECT_EQ(m["failures"].size(), 2u);
    EXPECT_NE(slurp(csv).find("failures"), std::string::npos);
    EXPECT_EQ(run({"compare", "--manifest", manifest(), "--arms", "finetune", "--out", csv.string()}).code, cli::exit_usage);
}

TEST_F(CliData, BenchWritesTimingCsv) {
    TempDir dir;
    const auto csv = dir / "t.csv";
    ASSERT_EQ(run({"bench", "--manifest", manifest(), "--projection-size", "8", "--epochs", "1", "--classifier", "logreg",
                   "--threads", "2", "--out", csv.string()})
                  .code,
              0);
    const auto lines = lines_of(csv);
    ASSERT_EQ(lines.size(), 4u);
    EXPECT_EQ(lines[0], "arm,threads,wall_seconds");
    EXPECT_EQ(lines[1].rfind("unprojected,2,", 0), 0u);
    EXPECT_EQ(lines[3].rfind("contrastive_permod,2,", 0), 0u);
}

// Default hyperparameters end to end on the default synthetic suite.
TEST(CliEndToEnd, SynthAdaptProjectWithinAMinute) {
    TempDir dir;
    const auto start = std::chrono::steady_clock::now();
    const auto data = dir / "data";
    ASSERT_EQ(run({"synth", "--n", "4000", "--out", data.string()}).code, 0);
    const auto pipe = dir / "pipe";
    const auto r = run({"adapt", "--manifest", (data / "manifest.json").string(), "--out", pipe.string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto csv = dir / "proj.csv";
    ASSERT_EQ(run({"project", "--pipeline", (pipe / "pipeline.json").string(), "--manifest",
                   (data / "manifest.json").string(), "--out", csv.string()})
                  .code,
              0);
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_LT(seconds, 60.0);

    const auto projected = read_embeddings_csv(csv);
    EXPECT_EQ(projected.values.rows(), 4000);
    EXPECT_EQ(projected.values.cols(), 128);

    const auto log = lines_of(pipe / "training_log_head0.csv");
    ASSERT_EQ(log.size(), 11u);
    const double first = std::stod(log[1].substr(log[1].find(',') + 1));
    const double last = std::stod(log[10].substr(log[10].find(',') + 1));
    EXPECT_LT(last, first);
}

}  // namespace
}  // namespace embadapt
