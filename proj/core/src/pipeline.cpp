#include "embadapt/pipeline.hpp"

#include "embadapt/contrastive.hpp"
#include "embadapt/errors.hpp"
#include "embadapt/parallel.hpp"
#include "embadapt/seeding.hpp"

#include <optional>
#include <stdexcept>
#include <string>

namespace embadapt {

std::string_view to_string(ProjectionMode mode) {
    return mode == ProjectionMode::single ? "single" : "permod";
}

ProjectionMode parse_projection_mode(std::string_view text) {
    if (text == "single") return ProjectionMode::single;
    if (text == "permod" || text == "per_modality") return ProjectionMode::per_modality;
    throw std::invalid_argument("unknown projection mode '" + std::string(text) + "'");
}

std::size_t AdaptedPipeline::output_dim() const {
    std::size_t total = 0;
    for (const auto& h : heads) total += h.output_dim();
    return total;
}

std::uint64_t head_seed(std::uint64_t seed, std::size_t j) {
    return seed ^ static_cast<std::uint64_t>(j);
}

namespace {

TrainConfig head_config(const TrainConfig& config, std::size_t j) {
    TrainConfig c = config;
    c.seed = head_seed(config.seed, j);
    return c;
}

}  // namespace

AdaptResult adapt(const MultimodalDataset& ds, ProjectionMode mode, const TrainConfig& config, std::size_t threads) {
    config.validate();
    if (!ds.has_both_classes()) throw DataError("adapt: labels contain a single class");

    AdaptResult result;
    result.pipeline.mode = mode;
    result.pipeline.modality_dims = ds.dims();
    if (mode == ProjectionMode::single) {
        TrainResult trained = train_head(concat_modalities(ds), ds.labels(), head_config(config, 0));
        result.pipeline.heads.push_back(std::move(trained.head));
        result.epoch_losses.push_back(std::move(trained.epoch_losses));
        return result;
    }

    const std::size_t m = ds.modality_count();
    std::vector<std::optional<TrainResult>> trained(m);
    parallel_for(m, threads, [&](std::size_t j) { trained[j] = train_head(ds.modality(j), ds.labels(), head_config(config, j)); });
    for (auto& t : trained) {
        result.pipeline.heads.push_back(std::move(t->head));
        result.epoch_losses.push_back(std::move(t->epoch_losses));
    }
    return result;
}

AdaptedPipeline initial_pipeline(const MultimodalDataset& ds, ProjectionMode mode, const TrainConfig& config) {
    config.validate();
    AdaptedPipeline p;
    p.mode = mode;
    p.modality_dims = ds.dims();
    auto init = [&](std::size_t input_dim, std::size_t j) {
        return ProjectionHead::init(input_dim, config, derive_seed(head_seed(config.seed, j), {seed_tag::head_init}));
    };
    if (mode == ProjectionMode::single) {
        p.heads.push_back(init(ds.total_dim(), 0));
    } else {
        for (std::size_t j = 0; j < ds.modality_count(); ++j) p.heads.push_back(init(ds.dims()[j], j));
    }
    return p;
}

EmbeddingMatrix apply(const AdaptedPipeline& pipeline, const MultimodalDataset& ds) {
    if (ds.dims() != pipeline.modality_dims) throw ShapeError("apply: dataset modality dims differ from the pipeline's");
    if (pipeline.mode == ProjectionMode::single) {
        if (pipeline.heads.size() != 1) throw ShapeError("apply: single-mode pipeline must have one head");
        return pipeline.heads.front().forward(concat_modalities(ds));
    }
    if (pipeline.heads.size() != ds.modality_count()) throw ShapeError("apply: need one head per modality");
    EmbeddingMatrix out(static_cast<Eigen::Index>(ds.size()), static_cast<Eigen::Index>(pipeline.output_dim()));
    Eigen::Index col = 0;
    for (std::size_t j = 0; j < pipeline.heads.size(); ++j) {
        const auto width = static_cast<Eigen::Index>(pipeline.heads[j].output_dim());
        out.middleCols(col, width) = pipeline.heads[j].forward(ds.modality(j));
        col += width;
    }
    return out;
}

bool bitwise_equal(const AdaptedPipeline& a, const AdaptedPipeline& b) {
    if (a.mode != b.mode || a.modality_dims != b.modality_dims || a.heads.size() != b.heads.size()) return false;
    for (std::size_t h = 0; h < a.heads.size(); ++h) {
        if (!bitwise_equal(a.heads[h], b.heads[h])) return false;
    }
    return true;
}

}  // namespace embadapt
