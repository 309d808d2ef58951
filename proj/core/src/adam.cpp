#include "embadapt/adam.hpp"

#include "embadapt/errors.hpp"

#include <cmath>

namespace embadapt {

AdamState::AdamState(const DenseNet& net, AdamParams params)
    : params_(params), m_(net.zero_gradients()), v_(net.zero_gradients()) {}

namespace {

template <typename Param, typename Grad>
void adam_update(Param& theta, Param& m, Param& v, const Grad& g, double b1, double b2, double step, double c1, double c2,
                 double eps) {
    m = b1 * m + (1.0 - b1) * g;
    v = b2 * v + (1.0 - b2) * g.cwiseProduct(g);
    theta.array() -= step * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
}

}  // namespace

void AdamState::step(DenseNet& net, const ParamGradients& grads, double learning_rate) {
    auto& layers = net.layers();
    if (grads.weight.size() != layers.size() || grads.bias.size() != layers.size() || m_.weight.size() != layers.size()) {
        throw ShapeError("adam: gradient layout does not match network");
    }
    for (std::size_t l = 0; l < layers.size(); ++l) {
        if (grads.weight[l].rows() != layers[l].weight.rows() || grads.weight[l].cols() != layers[l].weight.cols() ||
            grads.bias[l].size() != layers[l].bias.size() || m_.weight[l].rows() != layers[l].weight.rows() ||
            m_.weight[l].cols() != layers[l].weight.cols()) {
            throw ShapeError("adam: gradient shape mismatch in layer " + std::to_string(l));
        }
    }
    if (!grads.all_finite()) throw DivergenceError("adam: non-finite gradient");

    ++steps_;
    const double t = static_cast<double>(steps_);
    const double c1 = 1.0 - std::pow(params_.beta1, t);
    const double c2 = 1.0 - std::pow(params_.beta2, t);
    for (std::size_t l = 0; l < layers.size(); ++l) {
        adam_update(layers[l].weight, m_.weight[l], v_.weight[l], grads.weight[l], params_.beta1, params_.beta2, learning_rate, c1,
                    c2, params_.epsilon);
        adam_update(layers[l].bias, m_.bias[l], v_.bias[l], grads.bias[l], params_.beta1, params_.beta2, learning_rate, c1, c2,
                    params_.epsilon);
    }
}

}  // namespace embadapt
