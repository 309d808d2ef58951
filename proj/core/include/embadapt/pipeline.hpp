#pragma once

#include "embadapt/config.hpp"
#include "embadapt/dataset.hpp"
#include "embadapt/projection_head.hpp"

#include <string_view>
#include <vector>

namespace embadapt {

enum class ProjectionMode {
    /// One head over the concatenation of all modalities.
    single,
    /// One head per modality; outputs concatenated in modality order.
    per_modality,
};

std::string_view to_string(ProjectionMode mode);
/// Accepts "single", "permod" and "per_modality".
ProjectionMode parse_projection_mode(std::string_view text);

/// Trained contrastive heads and the modality layout they expect.
struct AdaptedPipeline {
    ProjectionMode mode = ProjectionMode::single;
    std::vector<ProjectionHead> heads;
    std::vector<std::size_t> modality_dims;

    std::size_t output_dim() const;
};

struct AdaptResult {
    AdaptedPipeline pipeline;
    /// epoch_losses[h] is the per-epoch mean pair loss of head h.
    std::vector<std::vector<double>> epoch_losses;
};

/// Seed used for head `j` in per-modality mode: config.seed XOR j.
std::uint64_t head_seed(std::uint64_t seed, std::size_t j);

/// Single mode trains one head on concat_modalities(ds); per-modality mode
/// trains head j on modality j alone with seed head_seed(config.seed, j).
/// Heads are independent, so up to `threads` of them train concurrently
/// without changing the result.
AdaptResult adapt(const MultimodalDataset& ds, ProjectionMode mode, const TrainConfig& config, std::size_t threads = 1);

/// Heads that adapt() would start from, before any training step.
AdaptedPipeline initial_pipeline(const MultimodalDataset& ds, ProjectionMode mode, const TrainConfig& config);

/// Projects every sample: n x K (single) or n x sum of head widths (per modality).
/// Throws ShapeError when the dataset's modality dims differ from the pipeline's.
EmbeddingMatrix apply(const AdaptedPipeline& pipeline, const MultimodalDataset& ds);

bool bitwise_equal(const AdaptedPipeline& a, const AdaptedPipeline& b);

}  // namespace embadapt
