#pragma once

#include "embadapt/dataset.hpp"
#include "embadapt/pipeline.hpp"

#include <filesystem>
#include <iosfwd>

namespace embadapt {

/// Principal components of a centered sample.
///
/// Rows of `components` are orthonormal and sorted by descending explained
/// variance (covariance normalized by n - 1). Each row's largest-magnitude
/// entry is positive (first such entry on ties).
struct PcaModel {
    Vector mean;                // d
    Matrix components;          // K x d
    Vector explained_variance;  // K, non-increasing, non-negative

    std::size_t input_dim() const { return static_cast<std::size_t>(mean.size()); }
    std::size_t output_dim() const { return static_cast<std::size_t>(components.rows()); }
};

/// Requires n >= 2 and 1 <= K <= min(n - 1, d); throws std::invalid_argument
/// otherwise, and DataError when every row is identical.
PcaModel pca_fit(const Matrix& x, std::size_t k);

/// (x - mean) * components^T. Throws ShapeError on a column mismatch.
Matrix pca_transform(const PcaModel& model, const Matrix& x);

/// PCA models laid out like an AdaptedPipeline: one over the concatenation,
/// or one per modality with the same K each.
struct PcaPipeline {
    ProjectionMode mode = ProjectionMode::single;
    std::vector<PcaModel> models;
    std::vector<std::size_t> modality_dims;

    std::size_t output_dim() const;
};

PcaPipeline fit_pca_pipeline(const MultimodalDataset& ds, ProjectionMode mode, std::size_t k);
EmbeddingMatrix apply(const PcaPipeline& pipeline, const MultimodalDataset& ds);

bool bitwise_equal(const PcaModel& a, const PcaModel& b);
bool bitwise_equal(const PcaPipeline& a, const PcaPipeline& b);

/// Text format, version 1:
///
///   embadapt.pca_model 1
///   shape <K> <d>
///   mean
///   <d values>
///   variance
///   <K values>
///   components
///   <K lines of d values>
void write_pca(std::ostream& out, const PcaModel& model);
PcaModel read_pca(std::istream& in);
void save_pca(const PcaModel& model, const std::filesystem::path& path);
PcaModel load_pca(const std::filesystem::path& path);

}  // namespace embadapt
