#include "embadapt/timing.hpp"

#include "embadapt/pipeline.hpp"
#include "embadapt/seeding.hpp"

#include <chrono>
#include <ostream>

namespace embadapt {

namespace {

template <typename F>
double seconds(F&& f) {
    const auto start = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

std::vector<TimingRecord> benchmark_timing(const MultimodalDataset& ds, const TrainConfig& config, std::size_t threads,
                                           ClassifierKind downstream) {
    const std::uint64_t clf_seed = derive_seed(config.seed, {seed_tag::classifier});
    std::vector<TimingRecord> records;

    records.push_back({"unprojected", threads, seconds([&] {
                           auto model = make_classifier(downstream, clf_seed);
                           model->fit(concat_modalities(ds), ds.labels());
                       })});

    AdaptedPipeline pipeline;
    const double adapt_seconds = seconds([&] { pipeline = adapt(ds, ProjectionMode::per_modality, config, threads).pipeline; });
    records.push_back({"contrastive_permod_adapt", threads, adapt_seconds});

    const double downstream_seconds = seconds([&] {
        auto model = make_classifier(downstream, clf_seed);
        model->fit(apply(pipeline, ds), ds.labels());
    });
    records.push_back({"contrastive_permod", threads, adapt_seconds + downstream_seconds});
    return records;
}

void write_timing_csv(const std::vector<TimingRecord>& records, std::ostream& out) {
    out << "arm,threads,wall_seconds\n";
    for (const auto& r : records) out << r.arm << ',' << r.threads << ',' << r.wall_seconds << '\n';
}

}  // namespace embadapt
