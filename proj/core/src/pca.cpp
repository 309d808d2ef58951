#include "embadapt/pca.hpp"

#include "embadapt/errors.hpp"

#include <Eigen/Eigenvalues>

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>
#include <string>

namespace embadapt {

PcaModel pca_fit(const Matrix& x, std::size_t k) {
    const auto n = static_cast<std::size_t>(x.rows());
    const auto d = static_cast<std::size_t>(x.cols());
    if (n < 2) throw std::invalid_argument("pca_fit: need at least 2 rows");
    if (k < 1 || k > std::min(n - 1, d)) {
        throw std::invalid_argument("pca_fit: K=" + std::to_string(k) + " outside [1, min(n-1, d)] = [1, " +
                                    std::to_string(std::min(n - 1, d)) + "]");
    }

    PcaModel model;
    model.mean = x.colwise().mean().transpose();
    const Matrix centered = x.rowwise() - model.mean.transpose();
    const Eigen::MatrixXd cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
    if (cov.trace() <= 0.0) throw DataError("pca_fit: input has zero variance");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) throw std::runtime_error("pca_fit: eigendecomposition failed");
    const Eigen::VectorXd& values = solver.eigenvalues();  // ascending
    const Eigen::MatrixXd& vectors = solver.eigenvectors();

    model.components.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(d));
    model.explained_variance.resize(static_cast<Eigen::Index>(k));
    for (std::size_t c = 0; c < k; ++c) {
        const auto src = static_cast<Eigen::Index>(d - 1 - c);
        Eigen::VectorXd v = vectors.col(src);
        Eigen::Index arg = 0;
        for (Eigen::Index i = 1; i < v.size(); ++i) {
            if (std::abs(v(i)) > std::abs(v(arg))) arg = i;
        }
        if (v(arg) < 0.0) v = -v;
        model.components.row(static_cast<Eigen::Index>(c)) = v.transpose();
        model.explained_variance(static_cast<Eigen::Index>(c)) = std::max(values(src), 0.0);
    }
    return model;
}

Matrix pca_transform(const PcaModel& model, const Matrix& x) {
    if (static_cast<std::size_t>(x.cols()) != model.input_dim()) {
        throw ShapeError("pca_transform: input has " + std::to_string(x.cols()) + " columns, model expects " +
                         std::to_string(model.input_dim()));
    }
    return (x.rowwise() - model.mean.transpose()) * model.components.transpose();
}

std::size_t PcaPipeline::output_dim() const {
    std::size_t total = 0;
    for (const auto& m : models) total += m.output_dim();
    return total;
}

PcaPipeline fit_pca_pipeline(const MultimodalDataset& ds, ProjectionMode mode, std::size_t k) {
    PcaPipeline p;
    p.mode = mode;
    p.modality_dims = ds.dims();
    if (mode == ProjectionMode::single) {
        p.models.push_back(pca_fit(concat_modalities(ds), k));
    } else {
        for (const auto& m : ds.modalities()) p.models.push_back(pca_fit(m, k));
    }
    return p;
}

EmbeddingMatrix apply(const PcaPipeline& pipeline, const MultimodalDataset& ds) {
    if (ds.dims() != pipeline.modality_dims) throw ShapeError("apply: dataset modality dims differ from the pipeline's");
    if (pipeline.mode == ProjectionMode::single) {
        if (pipeline.models.size() != 1) throw ShapeError("apply: single-mode pipeline must have one model");
        return pca_transform(pipeline.models.front(), concat_modalities(ds));
    }
    if (pipeline.models.size() != ds.modality_count()) throw ShapeError("apply: need one PCA model per modality");
    EmbeddingMatrix out(static_cast<Eigen::Index>(ds.size()), static_cast<Eigen::Index>(pipeline.output_dim()));
    Eigen::Index col = 0;
    for (std::size_t j = 0; j < pipeline.models.size(); ++j) {
        const auto width = static_cast<Eigen::Index>(pipeline.models[j].output_dim());
        out.middleCols(col, width) = pca_transform(pipeline.models[j], ds.modality(j));
        col += width;
    }
    return out;
}

bool bitwise_equal(const PcaModel& a, const PcaModel& b) {
    return bitwise_equal(a.mean, b.mean) && bitwise_equal(a.components, b.components) &&
           bitwise_equal(a.explained_variance, b.explained_variance);
}

bool bitwise_equal(const PcaPipeline& a, const PcaPipeline& b) {
    if (a.mode != b.mode || a.modality_dims != b.modality_dims || a.models.size() != b.models.size()) return false;
    for (std::size_t i = 0; i < a.models.size(); ++i) {
        if (!bitwise_equal(a.models[i], b.models[i])) return false;
    }
    return true;
}

namespace {

constexpr const char* kPcaMagic = "embadapt.pca_model";

void write_values(std::ostream& out, const double* v, Eigen::Index count) {
    for (Eigen::Index i = 0; i < count; ++i) {
        if (i) out << ' ';
        out << format_double(v[i]);
    }
    out << '\n';
}

void read_values(std::istream& in, double* v, Eigen::Index count) {
    std::string token;
    for (Eigen::Index i = 0; i < count; ++i) {
        if (!(in >> token)) throw DataError("pca model: truncated");
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v[i]);
        if (ec != std::errc() || ptr != token.data() + token.size() || !std::isfinite(v[i])) {
            throw DataError("pca model: malformed number '" + token + "'");
        }
    }
}

void expect(std::istream& in, const char* word) {
    std::string token;
    if (!(in >> token) || token != word) throw DataError(std::string("pca model: expected '") + word + "'");
}

}  // namespace

void write_pca(std::ostream& out, const PcaModel& model) {
    out << kPcaMagic << " 1\n";
    out << "shape " << model.components.rows() << ' ' << model.components.cols() << '\n';
    out << "mean\n";
    write_values(out, model.mean.data(), model.mean.size());
    out << "variance\n";
    write_values(out, model.explained_variance.data(), model.explained_variance.size());
    out << "components\n";
    for (Eigen::Index r = 0; r < model.components.rows(); ++r) write_values(out, model.components.row(r).data(), model.components.cols());
}

PcaModel read_pca(std::istream& in) {
    expect(in, kPcaMagic);
    int version = 0;
    if (!(in >> version) || version != 1) throw DataError("pca model: unsupported version");
    expect(in, "shape");
    Eigen::Index k = 0;
    Eigen::Index d = 0;
    if (!(in >> k >> d) || k < 1 || d < 1 || k > d) throw DataError("pca model: bad shape");
    PcaModel model;
    model.mean.resize(d);
    model.explained_variance.resize(k);
    model.components.resize(k, d);
    expect(in, "mean");
    read_values(in, model.mean.data(), d);
    expect(in, "variance");
    read_values(in, model.explained_variance.data(), k);
    expect(in, "components");
    read_values(in, model.components.data(), k * d);
    return model;
}

void save_pca(const PcaModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    write_pca(out, model);
    if (!out) throw DataError("write failed: " + path.string());
}

PcaModel load_pca(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("missing file: " + path.string());
    return read_pca(in);
}

}  // namespace embadapt
