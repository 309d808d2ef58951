#include "gradcheck.hpp"

#include "oracles.hpp"

#include <algorithm>
#include <cmath>

namespace embadapt::oracle {
namespace {

void compare(GradCheck& out, std::span<const double> analytic, std::span<const double> numeric) {
    for (std::size_t i = 0; i < analytic.size(); ++i) {
        ++out.checked;
        if (!gradients_match(analytic[i], numeric[i])) ++out.mismatches;
        const double scale = std::max(std::abs(analytic[i]), std::abs(numeric[i]));
        if (scale > 1e-6) out.worst_relative = std::max(out.worst_relative, std::abs(analytic[i] - numeric[i]) / scale);
    }
}

template <class Dense>
std::span<double> values(Dense& m) {
    return {m.data(), static_cast<std::size_t>(m.size())};
}

template <class Dense>
std::span<const double> values(const Dense& m) {
    return {m.data(), static_cast<std::size_t>(m.size())};
}

}  // namespace

ProjectionHead random_head(std::size_t input_dim, const TrainConfig& config, std::mt19937_64& rng) {
    ProjectionHead head = ProjectionHead::init(input_dim, config, rng());
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    for (auto& layer : head.net().layers())
        for (Eigen::Index i = 0; i < layer.bias.size(); ++i) layer.bias(i) = u(rng);
    return head;
}

GradCheck check_head_gradients(ProjectionHead head, const Matrix& x, const PairBatch& pairs, double tau, bool balanced) {
    ProjectionHead::Cache cache;
    const Matrix p = head.forward(x, cache);
    const auto loss = contrastive_loss(p, pairs, tau, balanced);
    const auto grads = head.backward(cache, loss.gradient);
    auto f = [&] { return contrastive_loss(head.forward(x), pairs, tau, balanced).loss; };

    GradCheck out;
    auto& layers = head.net().layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
        compare(out, values(grads.weight[l]), central_differences(values(layers[l].weight), f));
        compare(out, values(grads.bias[l]), central_differences(values(layers[l].bias), f));
    }
    return out;
}

GradCheck check_projection_gradients(Matrix projections, const PairBatch& pairs, double tau, bool balanced) {
    const auto loss = contrastive_loss(projections, pairs, tau, balanced);
    auto f = [&] { return contrastive_loss(projections, pairs, tau, balanced).loss; };
    GradCheck out;
    compare(out, values(loss.gradient), central_differences(values(projections), f));
    return out;
}

}  // namespace embadapt::oracle
