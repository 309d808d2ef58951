#include "embadapt/dense_net.hpp"

#include "embadapt/errors.hpp"
#include "embadapt/seeding.hpp"

#include <cmath>
#include <cstring>
#include <string>

namespace embadapt {

double ParamGradients::squared_norm() const {
    double s = 0.0;
    for (const auto& w : weight) s += w.squaredNorm();
    for (const auto& b : bias) s += b.squaredNorm();
    return s;
}

bool ParamGradients::all_finite() const {
    for (const auto& w : weight)
        if (!w.allFinite()) return false;
    for (const auto& b : bias)
        if (!b.allFinite()) return false;
    return true;
}

DenseNet::DenseNet(const std::vector<std::size_t>& layer_dims) {
    if (layer_dims.size() < 2) throw ShapeError("DenseNet needs an input and an output width");
    for (auto d : layer_dims) {
        if (d == 0) throw ShapeError("DenseNet layer widths must be positive");
    }
    for (std::size_t l = 0; l + 1 < layer_dims.size(); ++l) {
        const auto fan_in = static_cast<Eigen::Index>(layer_dims[l]);
        const auto fan_out = static_cast<Eigen::Index>(layer_dims[l + 1]);
        layers_.push_back({Matrix::Zero(fan_out, fan_in), Vector::Zero(fan_out)});
    }
}

DenseNet DenseNet::glorot_uniform(const std::vector<std::size_t>& layer_dims, std::uint64_t seed) {
    DenseNet net(layer_dims);
    Rng rng(seed);
    for (auto& layer : net.layers_) {
        const double limit = std::sqrt(6.0 / static_cast<double>(layer.weight.rows() + layer.weight.cols()));
        std::uniform_real_distribution<double> uniform(-limit, limit);
        for (Eigen::Index i = 0; i < layer.weight.rows(); ++i)
            for (Eigen::Index k = 0; k < layer.weight.cols(); ++k) layer.weight(i, k) = uniform(rng);
    }
    return net;
}

std::size_t DenseNet::input_dim() const {
    return static_cast<std::size_t>(layers_.front().weight.cols());
}

std::size_t DenseNet::output_dim() const {
    return static_cast<std::size_t>(layers_.back().weight.rows());
}

std::vector<std::size_t> DenseNet::layer_dims() const {
    std::vector<std::size_t> dims{input_dim()};
    for (const auto& layer : layers_) dims.push_back(static_cast<std::size_t>(layer.weight.rows()));
    return dims;
}

std::size_t DenseNet::parameter_count() const {
    std::size_t count = 0;
    for (const auto& layer : layers_) count += static_cast<std::size_t>(layer.weight.size() + layer.bias.size());
    return count;
}

Matrix DenseNet::forward(const Matrix& x) const {
    if (static_cast<std::size_t>(x.cols()) != input_dim()) {
        throw ShapeError("forward: input has " + std::to_string(x.cols()) + " columns, expected " + std::to_string(input_dim()));
    }
    Matrix h = x;
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        Matrix z = h * layers_[l].weight.transpose();
        z.rowwise() += layers_[l].bias.transpose();
        if (l + 1 < layers_.size()) z = z.cwiseMax(0.0);
        h = std::move(z);
    }
    return h;
}

Matrix DenseNet::forward(const Matrix& x, ForwardCache& cache) const {
    if (static_cast<std::size_t>(x.cols()) != input_dim()) {
        throw ShapeError("forward: input has " + std::to_string(x.cols()) + " columns, expected " + std::to_string(input_dim()));
    }
    cache.inputs.assign(1, x);
    cache.pre_activations.clear();
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        Matrix z = cache.inputs.back() * layers_[l].weight.transpose();
        z.rowwise() += layers_[l].bias.transpose();
        cache.pre_activations.push_back(z);
        if (l + 1 < layers_.size()) cache.inputs.push_back(z.cwiseMax(0.0));
    }
    return cache.pre_activations.back();
}

ParamGradients DenseNet::backward(const ForwardCache& cache, const Matrix& grad_out, Matrix* grad_input) const {
    if (cache.pre_activations.size() != layers_.size() || cache.inputs.size() != layers_.size()) {
        throw ShapeError("backward: cache does not come from this network");
    }
    const Matrix& out = cache.pre_activations.back();
    if (grad_out.rows() != out.rows() || grad_out.cols() != out.cols()) throw ShapeError("backward: output gradient shape mismatch");

    ParamGradients grads;
    grads.weight.resize(layers_.size());
    grads.bias.resize(layers_.size());
    Matrix delta = grad_out;
    for (std::size_t l = layers_.size(); l-- > 0;) {
        grads.weight[l] = delta.transpose() * cache.inputs[l];
        grads.bias[l] = delta.colwise().sum().transpose();
        if (l == 0 && grad_input == nullptr) break;
        Matrix upstream = delta * layers_[l].weight;
        if (l == 0) {
            *grad_input = std::move(upstream);
            break;
        }
        const Matrix& z = cache.pre_activations[l - 1];
        delta = upstream.cwiseProduct((z.array() > 0.0).cast<double>().matrix());
    }
    return grads;
}

ParamGradients DenseNet::zero_gradients() const {
    ParamGradients g;
    for (const auto& layer : layers_) {
        g.weight.push_back(Matrix::Zero(layer.weight.rows(), layer.weight.cols()));
        g.bias.push_back(Vector::Zero(layer.bias.size()));
    }
    return g;
}

bool bitwise_equal(const DenseNet& a, const DenseNet& b) {
    if (a.layer_count() != b.layer_count()) return false;
    for (std::size_t l = 0; l < a.layer_count(); ++l) {
        if (!bitwise_equal(a.layers()[l].weight, b.layers()[l].weight)) return false;
        if (!bitwise_equal(a.layers()[l].bias, b.layers()[l].bias)) return false;
    }
    return true;
}

}  // namespace embadapt
