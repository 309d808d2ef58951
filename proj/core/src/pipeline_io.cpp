#include "embadapt/pipeline_io.hpp"

#include "embadapt/errors.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

namespace embadapt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kPipelineFormat = "embadapt.pipeline";

void write_json(const json& doc, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << doc.dump(2) << '\n';
}

}  // namespace

fs::path save_pipeline(const AnyPipeline& pipeline, const fs::path& dir) {
    fs::create_directories(dir);
    json doc;
    doc["format"] = kPipelineFormat;
    doc["version"] = 1;
    json components = json::array();
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            doc["mode"] = std::string(to_string(p.mode));
            doc["modality_dims"] = p.modality_dims;
            if constexpr (std::is_same_v<T, AdaptedPipeline>) {
                doc["method"] = "contrastive";
                for (std::size_t h = 0; h < p.heads.size(); ++h) {
                    const std::string name = "head_" + std::to_string(h) + ".txt";
                    save_head(p.heads[h], dir / name);
                    components.push_back(name);
                }
            } else {
                doc["method"] = "pca";
                for (std::size_t h = 0; h < p.models.size(); ++h) {
                    const std::string name = "pca_" + std::to_string(h) + ".txt";
                    save_pca(p.models[h], dir / name);
                    components.push_back(name);
                }
            }
        },
        pipeline);
    doc["components"] = components;
    const fs::path manifest = dir / "pipeline.json";
    write_json(doc, manifest);
    return manifest;
}

AnyPipeline load_pipeline(const fs::path& manifest_path) {
    std::ifstream in(manifest_path, std::ios::binary);
    if (!in) throw DataError("missing file: " + manifest_path.string());
    const fs::path base = manifest_path.parent_path();
    try {
        const json doc = json::parse(in);
        if (doc.value("format", std::string{}) != kPipelineFormat || doc.value("version", 0) != 1) {
            throw DataError(manifest_path.string() + ": not a version-1 embadapt.pipeline manifest");
        }
        const ProjectionMode mode = parse_projection_mode(doc.at("mode").get<std::string>());
        const auto dims = doc.at("modality_dims").get<std::vector<std::size_t>>();
        const auto files = doc.at("components").get<std::vector<std::string>>();
        const std::size_t expected = mode == ProjectionMode::single ? 1 : dims.size();
        if (files.size() != expected) throw DataError(manifest_path.string() + ": component count does not match mode");

        const std::string method = doc.at("method").get<std::string>();
        if (method == "contrastive") {
            AdaptedPipeline p{mode, {}, dims};
            for (const auto& f : files) p.heads.push_back(load_head(base / f));
            return p;
        }
        if (method == "pca") {
            PcaPipeline p{mode, {}, dims};
            for (const auto& f : files) p.models.push_back(load_pca(base / f));
            return p;
        }
        throw DataError(manifest_path.string() + ": unknown method '" + method + "'");
    } catch (const json::exception& e) {
        throw DataError(manifest_path.string() + ": " + e.what());
    } catch (const std::invalid_argument& e) {
        throw DataError(manifest_path.string() + ": " + e.what());
    }
}

EmbeddingMatrix apply(const AnyPipeline& pipeline, const MultimodalDataset& ds) {
    return std::visit([&](const auto& p) { return apply(p, ds); }, pipeline);
}

void save_training_log(std::span<const double> epoch_losses, const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << "epoch,mean_pair_loss\n";
    for (std::size_t e = 0; e < epoch_losses.size(); ++e) out << (e + 1) << ',' << format_double(epoch_losses[e]) << '\n';
}

}  // namespace embadapt
