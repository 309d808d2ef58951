#include "embadapt/cli.hpp"

#include "embadapt/embadapt.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <stdexcept>

namespace embadapt::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;
using Clock = std::chrono::steady_clock;

constexpr const char* kRunManifestName = "run_manifest.json";

json config_json(const TrainConfig& c) {
    return {
        {"learning_rate", c.learning_rate},
        {"batch_size", c.batch_size},
        {"epochs", c.epochs},
        {"temperature", c.temperature},
        {"hidden_layers", c.hidden_layers},
        {"hidden_width", c.resolved_hidden_width()},
        {"projection_size", c.projection_size},
        {"include_self_pairs", c.include_self_pairs},
        {"normalize_outputs", c.normalize_outputs},
        {"balanced_pairs", c.balanced_pairs},
        {"seed", c.seed},
    };
}

/// Content hashes of a dataset manifest and every file it references.
json dataset_inputs(const fs::path& manifest_path, const MultimodalDataset& ds) {
    const auto manifest = read_manifest(manifest_path);
    json files = json::object();
    files[manifest_path.string()] = file_sha256(manifest_path);
    for (const auto& m : manifest.modalities) files[m.path.string()] = file_sha256(m.path);
    files[manifest.labels.string()] = file_sha256(manifest.labels);
    return {{"files", files}, {"dataset_fingerprint", fingerprint(ds)}};
}

/// Reproducibility record written next to every command's outputs.
class RunManifest {
public:
    RunManifest(std::string command, const std::vector<std::string>& argv)
        : start_(Clock::now()) {
        doc_["format"] = "embadapt.run";
        doc_["version"] = 1;
        doc_["command"] = std::move(command);
        doc_["argv"] = argv;
    }

    json& operator[](const char* key) { return doc_[key]; }
    void add_output(const fs::path& p) { doc_["outputs"].push_back(p.string()); }

    void write(const fs::path& path) {
        if (!doc_.contains("status")) doc_["status"] = "ok";
        doc_["wall_seconds"] = std::chrono::duration<double>(Clock::now() - start_).count();
        std::ofstream out(path);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << doc_.dump(2) << '\n';
    }

private:
    json doc_ = json::object();
    Clock::time_point start_;
};

void add_config_flags(CLI::App& cmd, TrainConfig& c, std::size_t& hidden_width, bool with_seed) {
    cmd.add_option("--lr,--learning-rate", c.learning_rate, "Adam step size")->capture_default_str();
    cmd.add_option("--batch-size", c.batch_size, "Minibatch size B (>= 2)")->capture_default_str();
    cmd.add_option("--epochs", c.epochs, "Training epochs N")->capture_default_str();
    cmd.add_option("--temperature", c.temperature, "Logit temperature tau")->capture_default_str();
    cmd.add_option("--hidden-layers", c.hidden_layers, "Hidden ReLU layers per head")->capture_default_str();
    cmd.add_option("--hidden-width", hidden_width, "Hidden layer width; 0 means 2 x projection size")
        ->capture_default_str();
    cmd.add_option("--projection-size", c.projection_size, "Output width K of each head (and PCA)")
        ->capture_default_str();
    cmd.add_option("--self-pairs", c.include_self_pairs, "Include (i, i) pairs in each batch")->default_str("true");
    cmd.add_option("--normalize", c.normalize_outputs, "L2-normalize head outputs")->default_str("true");
    cmd.add_flag("--balanced-pairs", c.balanced_pairs, "Weight pairs by inverse same/different frequency");
    if (with_seed) cmd.add_option("--seed", c.seed, "Seed for head initialization and shuffling")->capture_default_str();
}

void resolve_config(TrainConfig& c, std::size_t hidden_width) {
    if (hidden_width > 0) c.hidden_width = hidden_width;
    c.validate();
}

void prepare_parent(const fs::path& file) {
    if (file.has_parent_path()) fs::create_directories(file.parent_path());
}

fs::path sibling_manifest(const fs::path& file) {
    return fs::path(file.string() + "." + kRunManifestName);
}

/// Broadcast a flag list to m entries: empty uses `fallback` cyclically,
/// one value is repeated, otherwise the length must be m.
std::vector<std::size_t> per_modality(const std::vector<std::size_t>& given, const std::vector<std::size_t>& fallback,
                                      std::size_t m, const char* flag) {
    const auto& src = given.empty() ? fallback : given;
    if (!given.empty() && given.size() != 1 && given.size() != m)
        throw std::invalid_argument(std::string(flag) + " needs 1 or " + std::to_string(m) + " values");
    std::vector<std::size_t> out(m);
    for (std::size_t j = 0; j < m; ++j) out[j] = src.size() == 1 ? src[0] : src[j % src.size()];
    return out;
}

struct SynthArgs {
    SynthSpec spec;
    std::vector<std::size_t> dims;
    std::vector<std::size_t> signal_dims;
    std::string nonlinearity = "xor-rotate";
    fs::path out;
    bool force = false;
};

int cmd_synth(SynthArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
    const SynthSpec defaults;
    a.spec.dims = per_modality(a.dims, defaults.dims, a.spec.n_modalities, "--dims");
    a.spec.signal_dims = per_modality(a.signal_dims, defaults.signal_dims, a.spec.n_modalities, "--signal-dims");
    a.spec.nonlinearity = a.nonlinearity == "none" ? Nonlinearity::none : Nonlinearity::xor_rotate;
    a.spec.validate();

    if (fs::exists(a.out) && !fs::is_empty(a.out) && !a.force)
        throw std::runtime_error("output directory " + a.out.string() + " is not empty (use --force)");
    fs::create_directories(a.out);

    RunManifest run("synth", argv);
    run["spec"] = {
        {"n_samples", a.spec.n_samples},   {"n_modalities", a.spec.n_modalities},
        {"dims", a.spec.dims},             {"signal_dims", a.spec.signal_dims},
        {"noise_sigma", a.spec.noise_sigma}, {"class_balance", a.spec.class_balance},
        {"nonlinearity", a.nonlinearity},  {"signal_offset", a.spec.signal_offset},
        {"signal_noise_ratio", a.spec.signal_noise_ratio},
    };
    run["seeds"] = {{"seed", a.spec.seed}};
    run["inputs"] = json::object();

    const auto ds = generate_synthetic(a.spec);
    const auto manifest = save_dataset(ds, a.out);
    const auto written = read_manifest(manifest);
    for (const auto& m : written.modalities) run.add_output(m.path);
    run.add_output(written.labels);
    run.add_output(manifest);
    run["dataset_fingerprint"] = fingerprint(ds);
    run.write(a.out / kRunManifestName);
    out << manifest.string() << '\n';
    return exit_ok;
}

struct AdaptArgs {
    fs::path manifest;
    std::string mode = "single";
    std::string method = "contrastive";
    TrainConfig config;
    std::size_t hidden_width = 0;
    std::size_t threads = 8;
    fs::path out;
};

int cmd_adapt(AdaptArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
    resolve_config(a.config, a.hidden_width);
    const auto mode = parse_projection_mode(a.mode);
    const auto ds = load_dataset(a.manifest);
    fs::create_directories(a.out);

    RunManifest run("adapt", argv);
    run["method"] = a.method;
    run["mode"] = std::string(to_string(mode));
    run["config"] = config_json(a.config);
    run["threads"] = a.threads;
    run["inputs"] = dataset_inputs(a.manifest, ds);

    if (a.method == "pca") {
        const auto pipeline = fit_pca_pipeline(ds, mode, a.config.projection_size);
        run["seeds"] = json::object();
        const auto manifest = save_pipeline(pipeline, a.out);
        run.add_output(manifest);
        run.write(a.out / kRunManifestName);
        out << manifest.string() << '\n';
        return exit_ok;
    }

    json head_seeds = json::array();
    if (mode == ProjectionMode::single) head_seeds.push_back(a.config.seed);
    else
        for (std::size_t j = 0; j < ds.modality_count(); ++j) head_seeds.push_back(head_seed(a.config.seed, j));
    run["seeds"] = {{"seed", a.config.seed}, {"head_seeds", head_seeds}};

    const auto result = adapt(ds, mode, a.config, a.threads);
    const auto manifest = save_pipeline(result.pipeline, a.out);
    run.add_output(manifest);
    for (std::size_t h = 0; h < result.epoch_losses.size(); ++h) {
        const auto log = a.out / ("training_log_head" + std::to_string(h) + ".csv");
        save_training_log(result.epoch_losses[h], log);
        run.add_output(log);
    }
    run.write(a.out / kRunManifestName);
    out << manifest.string() << '\n';
    return exit_ok;
}

struct ProjectArgs {
    fs::path pipeline;
    fs::path manifest;
    fs::path out;
};

int cmd_project(ProjectArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
    fs::path pipeline_path = a.pipeline;
    if (fs::is_directory(pipeline_path)) pipeline_path /= "pipeline.json";
    const auto pipeline = load_pipeline(pipeline_path);
    const auto ds = load_dataset(a.manifest);

    RunManifest run("project", argv);
    run["seeds"] = json::object();
    run["inputs"] = dataset_inputs(a.manifest, ds);
    run["inputs"]["files"][pipeline_path.string()] = file_sha256(pipeline_path);

    const auto projected = apply(pipeline, ds);
    prepare_parent(a.out);
    save_embeddings(projected, ds.sample_ids(), a.out);
    run.add_output(a.out);
    run["shape"] = {projected.rows(), projected.cols()};
    run.write(sibling_manifest(a.out));
    out << a.out.string() << '\n';
    return exit_ok;
}

struct CompareArgs {
    fs::path manifest;
    std::vector<std::string> arms;
    std::vector<std::string> classifiers;
    std::size_t folds = 5;
    std::uint64_t seed = 0;
    std::size_t threads = 8;
    TrainConfig config;
    std::size_t hidden_width = 0;
    fs::path out;
};

int cmd_compare(CompareArgs& a, const std::vector<std::string>& argv, std::ostream& out, std::ostream& err) {
    resolve_config(a.config, a.hidden_width);
    ComparisonOptions options;
    if (!a.arms.empty()) {
        options.arms.clear();
        for (const auto& s : a.arms) options.arms.push_back(parse_arm(s));
    }
    if (!a.classifiers.empty()) {
        options.classifiers.clear();
        for (const auto& s : a.classifiers) options.classifiers.push_back(parse_classifier_kind(s));
    }
    options.config = a.config;
    options.folds = a.folds;
    options.seed = a.seed;
    options.threads = a.threads;

    const auto ds = load_dataset(a.manifest);
    RunManifest run("compare", argv);
    json arms = json::array();
    for (Arm arm : options.arms) arms.push_back(std::string(to_string(arm)));
    json classifiers = json::array();
    for (ClassifierKind k : options.classifiers) classifiers.push_back(std::string(to_string(k)));
    run["arms"] = arms;
    run["classifiers"] = classifiers;
    run["folds"] = options.folds;
    run["config"] = config_json(a.config);
    run["config"].erase("seed");
    run["seeds"] = {{"seed", options.seed}};
    run["threads"] = options.threads;
    run["inputs"] = dataset_inputs(a.manifest, ds);

    const auto report = run_comparison(ds, options);
    prepare_parent(a.out);
    {
        std::ofstream csv(a.out, std::ios::binary);
        if (!csv) throw std::runtime_error("cannot write " + a.out.string());
        write_report_csv(report, csv);
    }
    run.add_output(a.out);

    json failures = json::array();
    for (const auto& cell : report.cells)
        for (const auto& f : cell.failures)
            failures.push_back({{"arm", std::string(to_string(cell.arm))},
                                {"classifier", std::string(to_string(cell.classifier))},
                                {"fold", f.fold},
                                {"reason", f.reason}});
    run["failures"] = failures;
    run["status"] = failures.empty() ? "ok" : "failed";
    run.write(sibling_manifest(a.out));
    out << a.out.string() << '\n';
    if (!failures.empty()) {
        err << json{{"failures", failures}}.dump() << '\n';
        return exit_cells_failed;
    }
    return exit_ok;
}

struct BenchArgs {
    fs::path manifest;
    std::size_t threads = 8;
    std::string classifier = "mlp";
    TrainConfig config;
    std::size_t hidden_width = 0;
    fs::path out;
};

int cmd_bench(BenchArgs& a, const std::vector<std::string>& argv, std::ostream& out) {
    resolve_config(a.config, a.hidden_width);
    const auto downstream = parse_classifier_kind(a.classifier);
    const auto ds = load_dataset(a.manifest);

    RunManifest run("bench", argv);
    run["config"] = config_json(a.config);
    run["classifier"] = std::string(to_string(downstream));
    run["threads"] = a.threads;
    run["seeds"] = {{"seed", a.config.seed}};
    run["inputs"] = dataset_inputs(a.manifest, ds);

    const auto records = benchmark_timing(ds, a.config, a.threads, downstream);
    prepare_parent(a.out);
    {
        std::ofstream csv(a.out, std::ios::binary);
        if (!csv) throw std::runtime_error("cannot write " + a.out.string());
        write_timing_csv(records, csv);
    }
    run.add_output(a.out);
    run.write(sibling_manifest(a.out));
    out << a.out.string() << '\n';
    return exit_ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Adapt frozen multimodal embeddings with contrastive projection heads", "embadapt"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "embadapt 0.1.0");

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth", "Generate a synthetic multimodal dataset");
    synth_cmd->add_option("--n", synth.spec.n_samples, "Number of samples")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--modalities", synth.spec.n_modalities, "Number of modalities")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    synth_cmd->add_option("--dims", synth.dims, "Per-modality dimensions (one value is broadcast)")
        ->delimiter(',')
        ->default_str("256,128");
    synth_cmd->add_option("--signal-dims", synth.signal_dims, "Label-carrying coordinates per modality")
        ->delimiter(',')
        ->default_str("32,32");
    synth_cmd->add_option("--noise-sigma", synth.spec.noise_sigma, "Noise block standard deviation")
        ->capture_default_str();
    synth_cmd->add_option("--balance", synth.spec.class_balance, "Fraction of label-1 samples")->capture_default_str();
    synth_cmd->add_option("--nonlinearity", synth.nonlinearity, "Signal construction")
        ->capture_default_str()
        ->check(CLI::IsMember({"none", "xor-rotate"}));
    synth_cmd->add_option("--signal-offset", synth.spec.signal_offset, "Class separation of signal coordinates")
        ->capture_default_str();
    synth_cmd->add_option("--seed", synth.spec.seed, "Generator seed")->capture_default_str();
    synth_cmd->add_option("--out", synth.out, "Output directory")->required();
    synth_cmd->add_flag("--force", synth.force, "Write into a non-empty output directory");

    AdaptArgs adapt_args;
    auto* adapt_cmd = app.add_subcommand("adapt", "Fit contrastive heads (or PCA) on a dataset");
    adapt_cmd->add_option("--manifest", adapt_args.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
    adapt_cmd->add_option("--mode", adapt_args.mode, "Projection topology")
        ->capture_default_str()
        ->check(CLI::IsMember({"single", "permod"}));
    adapt_cmd->add_option("--method", adapt_args.method, "Projection method")
        ->capture_default_str()
        ->check(CLI::IsMember({"contrastive", "pca"}));
    add_config_flags(*adapt_cmd, adapt_args.config, adapt_args.hidden_width, true);
    adapt_cmd->add_option("--threads", adapt_args.threads, "Heads trained concurrently")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    adapt_cmd->add_option("--out", adapt_args.out, "Output directory for the pipeline")->required();

    ProjectArgs project;
    auto* project_cmd = app.add_subcommand("project", "Apply a fitted pipeline and export embeddings");
    project_cmd->add_option("--pipeline", project.pipeline, "pipeline.json or its directory")
        ->required()
        ->check(CLI::ExistingPath);
    project_cmd->add_option("--manifest", project.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
    project_cmd->add_option("--out", project.out, "Output embedding CSV")->required();

    CompareArgs compare;
    auto* compare_cmd = app.add_subcommand("compare", "Cross-validated comparison of arms and classifiers");
    compare_cmd->add_option("--manifest", compare.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
    compare_cmd
        ->add_option("--arms", compare.arms,
                     "Arms: unprojected, contrastive_single, contrastive_permod, pca_single, pca_permod")
        ->delimiter(',')
        ->default_str("all");
    compare_cmd->add_option("--classifiers", compare.classifiers, "Classifiers: logreg, cart, rf, linsvm, mlp")
        ->delimiter(',')
        ->default_str("all");
    compare_cmd->add_option("--folds", compare.folds, "Stratified folds k")->capture_default_str();
    compare_cmd->add_option("--seed", compare.seed, "Seed for folds, projections and classifiers")
        ->capture_default_str();
    compare_cmd->add_option("--threads", compare.threads, "Worker threads")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    add_config_flags(*compare_cmd, compare.config, compare.hidden_width, false);
    compare_cmd->add_option("--out", compare.out, "Output report CSV")->required();

    BenchArgs bench;
    auto* bench_cmd = app.add_subcommand("bench", "Time CPU adaptation against the unprojected baseline");
    bench_cmd->add_option("--manifest", bench.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
    bench_cmd->add_option("--threads", bench.threads, "Heads trained concurrently")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    bench_cmd->add_option("--classifier", bench.classifier, "Downstream classifier")->capture_default_str();
    add_config_flags(*bench_cmd, bench.config, bench.hidden_width, true);
    bench_cmd->add_option("--out", bench.out, "Output timing CSV")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? exit_ok : exit_usage;
    }

    std::vector<std::string> argv{"embadapt"};
    argv.insert(argv.end(), args.begin(), args.end());
    try {
        if (synth_cmd->parsed()) return cmd_synth(synth, argv, out);
        if (adapt_cmd->parsed()) return cmd_adapt(adapt_args, argv, out);
        if (project_cmd->parsed()) return cmd_project(project, argv, out);
        if (compare_cmd->parsed()) return cmd_compare(compare, argv, out, err);
        if (bench_cmd->parsed()) return cmd_bench(bench, argv, out);
    } catch (const std::invalid_argument& e) {
        err << "embadapt: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        err << "embadapt: " << e.what() << '\n';
        return exit_error;
    }
    return exit_usage;
}

}  // namespace embadapt::cli
