#pragma once

#include "embadapt/matrix.hpp"

#include <cstdint>
#include <vector>

namespace embadapt {

/// One affine layer: out = in * weight^T + bias.
struct DenseLayer {
    Matrix weight;  // fan_out x fan_in
    Vector bias;    // fan_out
};

/// Intermediate values kept by a forward pass for backpropagation.
struct ForwardCache {
    std::vector<Matrix> inputs;          // input to each layer
    std::vector<Matrix> pre_activations; // affine output of each layer
};

/// Gradients laid out like the network's parameters.
struct ParamGradients {
    std::vector<Matrix> weight;
    std::vector<Vector> bias;

    double squared_norm() const;
    bool all_finite() const;
};

/// Feed-forward stack with ReLU between layers and an affine output layer.
class DenseNet {
public:
    /// Zero-initialized network with the given layer widths (at least two).
    explicit DenseNet(const std::vector<std::size_t>& layer_dims);

    /// Weights uniform in +-sqrt(6 / (fan_in + fan_out)), biases zero.
    static DenseNet glorot_uniform(const std::vector<std::size_t>& layer_dims, std::uint64_t seed);

    std::size_t input_dim() const;
    std::size_t output_dim() const;
    std::vector<std::size_t> layer_dims() const;
    std::size_t layer_count() const noexcept { return layers_.size(); }
    std::size_t parameter_count() const;

    const std::vector<DenseLayer>& layers() const noexcept { return layers_; }
    std::vector<DenseLayer>& layers() noexcept { return layers_; }

    Matrix forward(const Matrix& x) const;
    Matrix forward(const Matrix& x, ForwardCache& cache) const;

    /// Parameter gradients of sum_i <grad_out_i, net(x_i)>; ReLU'(0) = 0.
    /// When `grad_input` is non-null it receives the gradient w.r.t. x.
    ParamGradients backward(const ForwardCache& cache, const Matrix& grad_out, Matrix* grad_input = nullptr) const;

    ParamGradients zero_gradients() const;

private:
    std::vector<DenseLayer> layers_;
};

bool bitwise_equal(const DenseNet& a, const DenseNet& b);

}  // namespace embadapt
