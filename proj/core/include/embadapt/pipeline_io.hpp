#pragma once

#include "embadapt/pca.hpp"
#include "embadapt/pipeline.hpp"

#include <filesystem>
#include <span>
#include <variant>

namespace embadapt {

/// Either a contrastive pipeline or a PCA pipeline.
using AnyPipeline = std::variant<AdaptedPipeline, PcaPipeline>;

/// Pipeline manifest `<dir>/pipeline.json`:
///
///   {
///     "format": "embadapt.pipeline",
///     "version": 1,
///     "method": "contrastive" | "pca",
///     "mode": "single" | "permod",
///     "modality_dims": [d_1, ..., d_m],
///     "components": ["head_0.txt", ...]    (or "pca_0.txt", ...)
///   }
///
/// Component files use the projection-head or PCA text formats.
/// Returns the manifest path.
std::filesystem::path save_pipeline(const AnyPipeline& pipeline, const std::filesystem::path& dir);
AnyPipeline load_pipeline(const std::filesystem::path& manifest_path);

EmbeddingMatrix apply(const AnyPipeline& pipeline, const MultimodalDataset& ds);

/// `epoch,mean_pair_loss` with epochs numbered from 1.
void save_training_log(std::span<const double> epoch_losses, const std::filesystem::path& path);

}  // namespace embadapt
