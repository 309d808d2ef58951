#pragma once

#include "embadapt/config.hpp"
#include "embadapt/dense_net.hpp"

#include <filesystem>
#include <iosfwd>

namespace embadapt {

/// Dimension-reducing ReLU network R^M -> R^K (K < M), optionally followed
/// by L2 normalization of each output row.
class ProjectionHead {
public:
    struct Cache {
        ForwardCache net;
        Matrix raw;    // pre-normalization output
        Vector norms;  // row norms of `raw` (only filled when normalizing)
    };

    /// Throws ShapeError unless output_dim < input_dim.
    ProjectionHead(DenseNet net, bool normalize_outputs);

    /// Layer widths [M, w x hidden_layers, K], Glorot-uniform weights.
    static ProjectionHead init(std::size_t input_dim, const TrainConfig& config, std::uint64_t seed);

    std::size_t input_dim() const { return net_.input_dim(); }
    std::size_t output_dim() const { return net_.output_dim(); }
    std::vector<std::size_t> layer_dims() const { return net_.layer_dims(); }
    bool normalize_outputs() const noexcept { return normalize_; }

    const DenseNet& net() const noexcept { return net_; }
    DenseNet& net() noexcept { return net_; }

    /// n x K; rows have unit norm when normalizing (all-zero rows stay zero).
    Matrix forward(const Matrix& x) const;
    Matrix forward(const Matrix& x, Cache& cache) const;

    /// Gradients of sum_i <grad_out_i, head(x_i)> through the normalization.
    ParamGradients backward(const Cache& cache, const Matrix& grad_out) const;

private:
    DenseNet net_;
    bool normalize_;
};

bool bitwise_equal(const ProjectionHead& a, const ProjectionHead& b);

/// Text format, version 1:
///
///   embadapt.projection_head 1
///   normalize <0|1>
///   dims <count> <M> <h_1> ... <K>
///   layer <l>            (once per layer, followed by)
///   <fan_out lines of fan_in weights>
///   <one line of fan_out biases>
///
/// Numbers are whitespace separated, shortest round-trip decimals, so
/// save -> load reproduces every parameter bit for bit.
void write_head(std::ostream& out, const ProjectionHead& head);
ProjectionHead read_head(std::istream& in);
void save_head(const ProjectionHead& head, const std::filesystem::path& path);
ProjectionHead load_head(const std::filesystem::path& path);

}  // namespace embadapt
