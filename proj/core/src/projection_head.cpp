#include "embadapt/projection_head.hpp"

#include "embadapt/dataset.hpp"
#include "embadapt/errors.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

namespace embadapt {

ProjectionHead::ProjectionHead(DenseNet net, bool normalize_outputs) : net_(std::move(net)), normalize_(normalize_outputs) {
    if (net_.output_dim() >= net_.input_dim()) {
        throw ShapeError("projection head must reduce dimension: K=" + std::to_string(net_.output_dim()) +
                         " is not below M=" + std::to_string(net_.input_dim()));
    }
}

ProjectionHead ProjectionHead::init(std::size_t input_dim, const TrainConfig& config, std::uint64_t seed) {
    if (config.projection_size >= input_dim) {
        throw ShapeError("projection size " + std::to_string(config.projection_size) + " must be below input dimension " +
                         std::to_string(input_dim));
    }
    std::vector<std::size_t> dims{input_dim};
    for (std::size_t l = 0; l < config.hidden_layers; ++l) dims.push_back(config.resolved_hidden_width());
    dims.push_back(config.projection_size);
    return ProjectionHead(DenseNet::glorot_uniform(dims, seed), config.normalize_outputs);
}

Matrix ProjectionHead::forward(const Matrix& x) const {
    Matrix out = net_.forward(x);
    if (normalize_) {
        for (Eigen::Index i = 0; i < out.rows(); ++i) {
            const double r = out.row(i).norm();
            if (r > 0.0) out.row(i) /= r;
        }
    }
    return out;
}

Matrix ProjectionHead::forward(const Matrix& x, Cache& cache) const {
    cache.raw = net_.forward(x, cache.net);
    if (!normalize_) {
        cache.norms.resize(0);
        return cache.raw;
    }
    Matrix out = cache.raw;
    cache.norms.resize(out.rows());
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
        const double r = out.row(i).norm();
        cache.norms(i) = r;
        if (r > 0.0) out.row(i) /= r;
    }
    return out;
}

ParamGradients ProjectionHead::backward(const Cache& cache, const Matrix& grad_out) const {
    if (grad_out.rows() != cache.raw.rows() || grad_out.cols() != cache.raw.cols()) {
        throw ShapeError("head backward: output gradient shape mismatch");
    }
    if (!normalize_) return net_.backward(cache.net, grad_out);

    // g = p / |p|  =>  dL/dp = (dL/dg - g <g, dL/dg>) / |p|
    Matrix grad_raw(grad_out.rows(), grad_out.cols());
    for (Eigen::Index i = 0; i < grad_out.rows(); ++i) {
        const double r = cache.norms(i);
        if (r == 0.0) {
            grad_raw.row(i).setZero();
            continue;
        }
        const auto g = cache.raw.row(i) / r;
        grad_raw.row(i) = (grad_out.row(i) - g * g.dot(grad_out.row(i))) / r;
    }
    return net_.backward(cache.net, grad_raw);
}

bool bitwise_equal(const ProjectionHead& a, const ProjectionHead& b) {
    return a.normalize_outputs() == b.normalize_outputs() && bitwise_equal(a.net(), b.net());
}

namespace {

constexpr const char* kHeadMagic = "embadapt.projection_head";
constexpr int kHeadVersion = 1;

void write_row(std::ostream& out, const double* values, Eigen::Index count) {
    for (Eigen::Index k = 0; k < count; ++k) {
        if (k) out << ' ';
        out << format_double(values[k]);
    }
    out << '\n';
}

double read_number(std::istream& in) {
    std::string token;
    if (!(in >> token)) throw DataError("projection head: truncated parameter block");
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc() || ptr != token.data() + token.size()) throw DataError("projection head: malformed number '" + token + "'");
    return v;
}

void expect_token(std::istream& in, const std::string& expected) {
    std::string token;
    if (!(in >> token) || token != expected) throw DataError("projection head: expected '" + expected + "'");
}

}  // namespace

void write_head(std::ostream& out, const ProjectionHead& head) {
    out << kHeadMagic << ' ' << kHeadVersion << '\n';
    out << "normalize " << (head.normalize_outputs() ? 1 : 0) << '\n';
    const auto dims = head.layer_dims();
    out << "dims " << dims.size();
    for (auto d : dims) out << ' ' << d;
    out << '\n';
    const auto& layers = head.net().layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        out << "layer " << l << '\n';
        const Matrix& w = layers[l].weight;
        for (Eigen::Index i = 0; i < w.rows(); ++i) write_row(out, w.row(i).data(), w.cols());
        write_row(out, layers[l].bias.data(), layers[l].bias.size());
    }
}

ProjectionHead read_head(std::istream& in) {
    expect_token(in, kHeadMagic);
    int version = 0;
    if (!(in >> version) || version != kHeadVersion) throw DataError("projection head: unsupported version");
    expect_token(in, "normalize");
    int normalize = -1;
    if (!(in >> normalize) || (normalize != 0 && normalize != 1)) throw DataError("projection head: bad normalize flag");
    expect_token(in, "dims");
    std::size_t count = 0;
    if (!(in >> count) || count < 2 || count > 64) throw DataError("projection head: bad layer count");
    std::vector<std::size_t> dims(count);
    for (auto& d : dims) {
        if (!(in >> d) || d == 0) throw DataError("projection head: bad layer width");
    }
    DenseNet net(dims);
    auto& layers = net.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        expect_token(in, "layer");
        std::size_t index = 0;
        if (!(in >> index) || index != l) throw DataError("projection head: layers out of order");
        Matrix& w = layers[l].weight;
        for (Eigen::Index i = 0; i < w.rows(); ++i)
            for (Eigen::Index k = 0; k < w.cols(); ++k) w(i, k) = read_number(in);
        for (Eigen::Index i = 0; i < layers[l].bias.size(); ++i) layers[l].bias(i) = read_number(in);
        if (!w.allFinite() || !layers[l].bias.allFinite()) throw DataError("projection head: non-finite parameter");
    }
    return ProjectionHead(std::move(net), normalize == 1);
}

void save_head(const ProjectionHead& head, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    write_head(out, head);
    if (!out) throw DataError("write failed: " + path.string());
}

ProjectionHead load_head(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("missing file: " + path.string());
    return read_head(in);
}

}  // namespace embadapt
