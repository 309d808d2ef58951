#pragma once

#include "embadapt/matrix.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace embadapt {

/// Per-modality embedding matrices plus binary labels, aligned by row.
///
/// Row i of every modality, labels[i] and sample_ids[i] describe the same
/// sample. The constructor validates alignment, finiteness, label domain and
/// id uniqueness and throws DataError on any violation; instances are
/// immutable afterwards.
class MultimodalDataset {
public:
    MultimodalDataset(std::vector<std::string> modality_names,
                      std::vector<EmbeddingMatrix> modalities,
                      Labels labels,
                      std::vector<std::string> sample_ids);

    std::size_t size() const noexcept { return labels_.size(); }
    std::size_t modality_count() const noexcept { return modalities_.size(); }
    std::vector<std::size_t> dims() const;
    std::size_t total_dim() const;

    const EmbeddingMatrix& modality(std::size_t j) const { return modalities_.at(j); }
    const std::vector<EmbeddingMatrix>& modalities() const noexcept { return modalities_; }
    const std::string& modality_name(std::size_t j) const { return names_.at(j); }
    const std::vector<std::string>& modality_names() const noexcept { return names_; }
    const Labels& labels() const noexcept { return labels_; }
    const std::vector<std::string>& sample_ids() const noexcept { return ids_; }

    std::size_t positives() const;
    bool has_both_classes() const;

    /// Rows in the given order; ids stay unique as long as `rows` has no repeats.
    MultimodalDataset subset(std::span<const std::size_t> rows) const;

    /// Copy with modality `j` replaced by `values` (same shape).
    MultimodalDataset with_modality(std::size_t j, EmbeddingMatrix values) const;

private:
    std::vector<std::string> names_;
    std::vector<EmbeddingMatrix> modalities_;
    Labels labels_;
    std::vector<std::string> ids_;
};

/// n x (sum of d_j): modality blocks side by side in modality order.
EmbeddingMatrix concat_modalities(const MultimodalDataset& ds);

/// Column widths of each modality block; inverse of concat_modalities.
std::vector<EmbeddingMatrix> split_columns(const EmbeddingMatrix& m, std::span<const std::size_t> dims);

struct ModalityEntry {
    std::string name;
    std::filesystem::path path;
};

/// Dataset manifest (JSON):
///
///   {
///     "format": "embadapt.dataset",
///     "version": 1,
///     "modalities": [ {"name": "notes", "path": "notes.csv"}, ... ],
///     "labels": "labels.csv"
///   }
///
/// Relative paths resolve against the manifest's directory.
struct DatasetManifest {
    std::vector<ModalityEntry> modalities;
    std::filesystem::path labels;
};

DatasetManifest read_manifest(const std::filesystem::path& manifest_path);
void write_manifest(const DatasetManifest& manifest, const std::filesystem::path& manifest_path);

/// Loads every modality and the label file named in the manifest.
/// Row order follows the label file; modality files may list ids in any order.
MultimodalDataset load_dataset(const std::filesystem::path& manifest_path);

struct IdMatrix {
    std::vector<std::string> ids;
    EmbeddingMatrix values;
};

/// Reads a modality CSV (`id,dim_0,...,dim_{d-1}`).
IdMatrix read_embeddings_csv(const std::filesystem::path& path);

/// Writes a modality CSV. Values use the shortest decimal form that parses
/// back to the identical double.
void save_embeddings(const EmbeddingMatrix& mat, std::span<const std::string> ids, const std::filesystem::path& path);

void save_labels(std::span<const int> labels, std::span<const std::string> ids, const std::filesystem::path& path);

/// Writes `<dir>/<name>.csv` per modality, `<dir>/labels.csv` and `<dir>/manifest.json`.
/// Returns the manifest path.
std::filesystem::path save_dataset(const MultimodalDataset& ds, const std::filesystem::path& dir);

/// SHA-256 over labels, ids and every modality's raw values; hex encoded.
std::string fingerprint(const MultimodalDataset& ds);

/// SHA-256 of a file's bytes; hex encoded.
std::string file_sha256(const std::filesystem::path& path);

/// Shortest round-trip decimal rendering of a double.
std::string format_double(double v);

}  // namespace embadapt
