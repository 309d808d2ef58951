#include "embadapt/dataset.hpp"

#include "embadapt/errors.hpp"

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace embadapt {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifestFormat = "embadapt.dataset";
constexpr int kManifestVersion = 1;

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

std::string_view strip_cr(std::string_view s) {
    if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view field, const fs::path& path, std::size_t line_no) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || ptr != field.data() + field.size()) {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed number '" + std::string(field) + "'");
    }
    if (!std::isfinite(v)) {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": non-finite value");
    }
    return v;
}

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("missing file: " + path.string());
    return in;
}

fs::path resolve(const fs::path& base_dir, const fs::path& p) {
    return p.is_absolute() ? p : base_dir / p;
}

struct IdLabels {
    std::vector<std::string> ids;
    Labels labels;
};

IdLabels read_labels_csv(const fs::path& path) {
    auto in = open_input(path);
    std::string line;
    if (!std::getline(in, line) || strip_cr(line) != "id,label") {
        throw DataError(path.string() + ": expected header 'id,label'");
    }
    IdLabels out;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = strip_cr(line);
        if (view.empty()) continue;
        auto fields = split_csv_line(view);
        if (fields.size() != 2) throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected 2 fields");
        if (fields[1] != "0" && fields[1] != "1") {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": label outside {0,1}");
        }
        out.ids.emplace_back(fields[0]);
        out.labels.push_back(fields[1] == "1" ? 1 : 0);
    }
    return out;
}

class Sha256 {
public:
    Sha256() : ctx_(EVP_MD_CTX_new(), &EVP_MD_CTX_free) {
        if (!ctx_ || EVP_DigestInit_ex(ctx_.get(), EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
    }
    void update(const void* data, std::size_t size) { EVP_DigestUpdate(ctx_.get(), data, size); }
    void update(std::string_view s) { update(s.data(), s.size()); }
    std::string hex() {
        std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
        unsigned int len = 0;
        EVP_DigestFinal_ex(ctx_.get(), digest.data(), &len);
        static constexpr char kHex[] = "0123456789abcdef";
        std::string out;
        for (unsigned int i = 0; i < len; ++i) {
            out.push_back(kHex[digest[i] >> 4]);
            out.push_back(kHex[digest[i] & 0xF]);
        }
        return out;
    }

private:
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx_;
};

}  // namespace

MultimodalDataset::MultimodalDataset(std::vector<std::string> modality_names,
                                     std::vector<EmbeddingMatrix> modalities,
                                     Labels labels,
                                     std::vector<std::string> sample_ids)
    : names_(std::move(modality_names)),
      modalities_(std::move(modalities)),
      labels_(std::move(labels)),
      ids_(std::move(sample_ids)) {
    if (modalities_.empty()) throw DataError("dataset needs at least one modality");
    if (names_.size() != modalities_.size()) throw DataError("modality name count does not match modality count");
    const std::size_t n = labels_.size();
    if (ids_.size() != n) throw DataError("sample id count does not match label count");
    for (std::size_t j = 0; j < modalities_.size(); ++j) {
        const auto& m = modalities_[j];
        if (static_cast<std::size_t>(m.rows()) != n) {
            throw DataError("modality '" + names_[j] + "' has " + std::to_string(m.rows()) + " rows, expected " + std::to_string(n));
        }
        if (m.cols() < 1) throw DataError("modality '" + names_[j] + "' has no columns");
        if (!m.allFinite()) throw DataError("modality '" + names_[j] + "' contains a non-finite value");
    }
    for (int y : labels_) {
        if (y != 0 && y != 1) throw DataError("label outside {0,1}");
    }
    std::unordered_set<std::string> seen;
    seen.reserve(n);
    for (const auto& id : ids_) {
        if (!seen.insert(id).second) throw DataError("duplicate id: " + id);
    }
}

std::vector<std::size_t> MultimodalDataset::dims() const {
    std::vector<std::size_t> d;
    d.reserve(modalities_.size());
    for (const auto& m : modalities_) d.push_back(static_cast<std::size_t>(m.cols()));
    return d;
}

std::size_t MultimodalDataset::total_dim() const {
    std::size_t total = 0;
    for (const auto& m : modalities_) total += static_cast<std::size_t>(m.cols());
    return total;
}

std::size_t MultimodalDataset::positives() const {
    std::size_t count = 0;
    for (int y : labels_) count += static_cast<std::size_t>(y);
    return count;
}

bool MultimodalDataset::has_both_classes() const {
    const std::size_t pos = positives();
    return pos > 0 && pos < labels_.size();
}

MultimodalDataset MultimodalDataset::subset(std::span<const std::size_t> rows) const {
    std::vector<EmbeddingMatrix> mods;
    mods.reserve(modalities_.size());
    for (const auto& m : modalities_) mods.push_back(gather_rows(m, rows));
    std::vector<std::string> ids;
    ids.reserve(rows.size());
    for (std::size_t r : rows) ids.push_back(ids_.at(r));
    return MultimodalDataset(names_, std::move(mods), gather_labels(labels_, rows), std::move(ids));
}

MultimodalDataset MultimodalDataset::with_modality(std::size_t j, EmbeddingMatrix values) const {
    auto mods = modalities_;
    if (values.rows() != mods.at(j).rows() || values.cols() != mods.at(j).cols()) {
        throw ShapeError("replacement modality shape mismatch");
    }
    mods[j] = std::move(values);
    return MultimodalDataset(names_, std::move(mods), labels_, ids_);
}

EmbeddingMatrix concat_modalities(const MultimodalDataset& ds) {
    if (ds.modality_count() == 1) return ds.modality(0);
    EmbeddingMatrix out(static_cast<Eigen::Index>(ds.size()), static_cast<Eigen::Index>(ds.total_dim()));
    Eigen::Index col = 0;
    for (const auto& m : ds.modalities()) {
        out.middleCols(col, m.cols()) = m;
        col += m.cols();
    }
    return out;
}

std::vector<EmbeddingMatrix> split_columns(const EmbeddingMatrix& m, std::span<const std::size_t> dims) {
    std::size_t total = 0;
    for (auto d : dims) total += d;
    if (total != static_cast<std::size_t>(m.cols())) throw ShapeError("split_columns: widths do not sum to column count");
    std::vector<EmbeddingMatrix> out;
    Eigen::Index col = 0;
    for (auto d : dims) {
        out.emplace_back(m.middleCols(col, static_cast<Eigen::Index>(d)));
        col += static_cast<Eigen::Index>(d);
    }
    return out;
}

DatasetManifest read_manifest(const fs::path& manifest_path) {
    auto in = open_input(manifest_path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::exception& e) {
        throw DataError(manifest_path.string() + ": " + e.what());
    }
    if (doc.value("format", std::string{}) != kManifestFormat) {
        throw DataError(manifest_path.string() + ": not an embadapt.dataset manifest");
    }
    if (doc.value("version", 0) != kManifestVersion) {
        throw DataError(manifest_path.string() + ": unsupported manifest version");
    }
    const fs::path base = manifest_path.parent_path();
    DatasetManifest manifest;
    try {
        for (const auto& entry : doc.at("modalities")) {
            manifest.modalities.push_back({entry.at("name").get<std::string>(), resolve(base, entry.at("path").get<std::string>())});
        }
        manifest.labels = resolve(base, doc.at("labels").get<std::string>());
    } catch (const json::exception& e) {
        throw DataError(manifest_path.string() + ": " + e.what());
    }
    if (manifest.modalities.empty()) throw DataError(manifest_path.string() + ": no modalities listed");
    return manifest;
}

void write_manifest(const DatasetManifest& manifest, const fs::path& manifest_path) {
    const fs::path base = manifest_path.parent_path();
    json doc;
    doc["format"] = kManifestFormat;
    doc["version"] = kManifestVersion;
    doc["modalities"] = json::array();
    auto relative = [&](const fs::path& p) {
        return (!base.empty() && p.parent_path() == base) ? p.filename().generic_string() : p.generic_string();
    };
    for (const auto& m : manifest.modalities) {
        doc["modalities"].push_back({{"name", m.name}, {"path", relative(m.path)}});
    }
    doc["labels"] = relative(manifest.labels);
    std::ofstream out(manifest_path, std::ios::binary);
    if (!out) throw DataError("cannot write " + manifest_path.string());
    out << doc.dump(2) << '\n';
}

IdMatrix read_embeddings_csv(const fs::path& path) {
    auto in = open_input(path);
    std::string line;
    if (!std::getline(in, line)) throw DataError(path.string() + ": empty file");
    auto header = split_csv_line(strip_cr(line));
    if (header.size() < 2 || header[0] != "id") throw DataError(path.string() + ": expected header 'id,dim_0,...'");
    const std::size_t d = header.size() - 1;

    IdMatrix out;
    std::vector<double> values;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = strip_cr(line);
        if (view.empty()) continue;
        auto fields = split_csv_line(view);
        if (fields.size() != d + 1) {
            throw DataError(path.string() + ":" + std::to_string(line_no) + ": expected " + std::to_string(d + 1) + " fields");
        }
        out.ids.emplace_back(fields[0]);
        for (std::size_t k = 1; k <= d; ++k) values.push_back(parse_double(fields[k], path, line_no));
    }
    out.values = Eigen::Map<EmbeddingMatrix>(values.data(), static_cast<Eigen::Index>(out.ids.size()), static_cast<Eigen::Index>(d));
    return out;
}

MultimodalDataset load_dataset(const fs::path& manifest_path) {
    const DatasetManifest manifest = read_manifest(manifest_path);
    IdLabels labels = read_labels_csv(manifest.labels);

    std::unordered_map<std::string, std::size_t> row_of;
    row_of.reserve(labels.ids.size());
    for (std::size_t i = 0; i < labels.ids.size(); ++i) {
        if (!row_of.emplace(labels.ids[i], i).second) throw DataError("duplicate id: " + labels.ids[i]);
    }

    std::vector<std::string> names;
    std::vector<EmbeddingMatrix> mods;
    for (const auto& entry : manifest.modalities) {
        IdMatrix raw = read_embeddings_csv(entry.path);
        if (raw.ids.size() != labels.ids.size()) {
            throw DataError("modality '" + entry.name + "' has " + std::to_string(raw.ids.size()) + " rows but the label file has " +
                            std::to_string(labels.ids.size()));
        }
        EmbeddingMatrix aligned(raw.values.rows(), raw.values.cols());
        std::vector<bool> filled(raw.ids.size(), false);
        for (std::size_t r = 0; r < raw.ids.size(); ++r) {
            auto it = row_of.find(raw.ids[r]);
            if (it == row_of.end()) throw DataError("id '" + raw.ids[r] + "' in modality '" + entry.name + "' has no label");
            if (filled[it->second]) throw DataError("duplicate id: " + raw.ids[r]);
            filled[it->second] = true;
            aligned.row(static_cast<Eigen::Index>(it->second)) = raw.values.row(static_cast<Eigen::Index>(r));
        }
        names.push_back(entry.name);
        mods.push_back(std::move(aligned));
    }
    return MultimodalDataset(std::move(names), std::move(mods), std::move(labels.labels), std::move(labels.ids));
}

std::string format_double(double v) {
    std::array<char, 32> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return std::string(buf.data(), ptr);
}

void save_embeddings(const EmbeddingMatrix& mat, std::span<const std::string> ids, const fs::path& path) {
    if (static_cast<std::size_t>(mat.rows()) != ids.size()) throw ShapeError("save_embeddings: row count does not match id count");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    std::string line = "id";
    for (Eigen::Index k = 0; k < mat.cols(); ++k) line += ",dim_" + std::to_string(k);
    out << line << '\n';
    std::array<char, 32> buf{};
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
        line = ids[static_cast<std::size_t>(i)];
        for (Eigen::Index k = 0; k < mat.cols(); ++k) {
            auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), mat(i, k));
            line.push_back(',');
            line.append(buf.data(), ptr);
        }
        out << line << '\n';
    }
    if (!out) throw DataError("write failed: " + path.string());
}

void save_labels(std::span<const int> labels, std::span<const std::string> ids, const fs::path& path) {
    if (labels.size() != ids.size()) throw ShapeError("save_labels: label count does not match id count");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << "id,label\n";
    for (std::size_t i = 0; i < labels.size(); ++i) out << ids[i] << ',' << labels[i] << '\n';
    if (!out) throw DataError("write failed: " + path.string());
}

fs::path save_dataset(const MultimodalDataset& ds, const fs::path& dir) {
    fs::create_directories(dir);
    DatasetManifest manifest;
    for (std::size_t j = 0; j < ds.modality_count(); ++j) {
        const fs::path p = dir / (ds.modality_name(j) + ".csv");
        save_embeddings(ds.modality(j), ds.sample_ids(), p);
        manifest.modalities.push_back({ds.modality_name(j), p});
    }
    manifest.labels = dir / "labels.csv";
    save_labels(ds.labels(), ds.sample_ids(), manifest.labels);
    const fs::path manifest_path = dir / "manifest.json";
    write_manifest(manifest, manifest_path);
    return manifest_path;
}

std::string fingerprint(const MultimodalDataset& ds) {
    Sha256 h;
    const std::uint64_t n = ds.size();
    const std::uint64_t m = ds.modality_count();
    h.update(&n, sizeof n);
    h.update(&m, sizeof m);
    for (std::size_t i = 0; i < ds.size(); ++i) {
        h.update(ds.sample_ids()[i]);
        h.update("\0", 1);
        const char y = static_cast<char>('0' + ds.labels()[i]);
        h.update(&y, 1);
    }
    for (const auto& mat : ds.modalities()) {
        const std::uint64_t cols = static_cast<std::uint64_t>(mat.cols());
        h.update(&cols, sizeof cols);
        h.update(mat.data(), static_cast<std::size_t>(mat.size()) * sizeof(double));
    }
    return h.hex();
}

std::string file_sha256(const fs::path& path) {
    auto in = open_input(path);
    Sha256 h;
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        h.update(buf.data(), static_cast<std::size_t>(in.gcount()));
    }
    return h.hex();
}

}  // namespace embadapt
