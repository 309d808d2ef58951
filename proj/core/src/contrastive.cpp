#include "embadapt/contrastive.hpp"

#include "embadapt/adam.hpp"
#include "embadapt/errors.hpp"
#include "embadapt/seeding.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace embadapt {

PairBatch build_pairs(std::span<const int> batch_labels, bool include_self_pairs) {
    const std::size_t b = batch_labels.size();
    if (b < 2) throw std::invalid_argument("build_pairs: batch needs at least 2 samples");
    PairBatch out;
    out.pairs.reserve(include_self_pairs ? b * (b + 1) / 2 : b * (b - 1) / 2);
    for (std::size_t u = 0; u < b; ++u) {
        const std::size_t last = include_self_pairs ? u + 1 : u;
        for (std::size_t v = 0; v < last; ++v) {
            out.pairs.push_back({static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v),
                                 static_cast<std::uint8_t>(batch_labels[u] == batch_labels[v] ? 1 : 0)});
        }
    }
    return out;
}

double pair_logit(std::span<const double> pu, std::span<const double> pv, double tau) {
    if (pu.size() != pv.size()) throw ShapeError("pair_logit: dimension mismatch");
    return std::inner_product(pu.begin(), pu.end(), pv.begin(), 0.0) / tau;
}

double softplus(double s) {
    return std::max(s, 0.0) + std::log1p(std::exp(-std::abs(s)));
}

double sigmoid(double s) {
    if (s >= 0.0) return 1.0 / (1.0 + std::exp(-s));
    const double e = std::exp(s);
    return e / (1.0 + e);
}

LossResult contrastive_loss(const Matrix& projections, const PairBatch& pairs, double tau, bool balanced) {
    if (pairs.pairs.empty()) throw std::invalid_argument("contrastive_loss: empty pair set");
    const auto rows = static_cast<std::uint32_t>(projections.rows());
    std::size_t positives = 0;
    for (const auto& p : pairs.pairs) {
        if (p.u >= rows || p.v >= rows) throw std::invalid_argument("contrastive_loss: pair index out of range");
        positives += p.same;
    }

    double weight_same = 1.0;
    double weight_diff = 1.0;
    if (balanced) {
        const double total = static_cast<double>(pairs.size());
        const std::size_t negatives = pairs.size() - positives;
        if (positives > 0) weight_same = total / static_cast<double>(positives);
        if (negatives > 0) weight_diff = total / static_cast<double>(negatives);
    }

    const Matrix gram = projections * projections.transpose();
    // coeff(u, v) = d loss / d s_uv, accumulated over the (lower-triangular) pair set.
    Matrix coeff = Matrix::Zero(projections.rows(), projections.rows());
    double loss = 0.0;
    double unweighted = 0.0;
    for (const auto& p : pairs.pairs) {
        const double s = gram(p.u, p.v) / tau;
        const double w = p.same ? weight_same : weight_diff;
        const double pair_loss = softplus(s) - (p.same ? s : 0.0);
        loss += w * pair_loss;
        unweighted += pair_loss;
        coeff(p.u, p.v) += w * (sigmoid(s) - static_cast<double>(p.same));
    }
    // s_uv = <p_u, p_v> / tau, so d s / d p_u = p_v / tau and d s / d p_v = p_u / tau.
    const Matrix sym = coeff + coeff.transpose();
    return LossResult{loss, unweighted, (sym * projections) / tau};
}

TrainResult train_head(const EmbeddingMatrix& embeddings, std::span<const int> labels, const TrainConfig& config) {
    config.validate();
    const std::size_t n = labels.size();
    if (static_cast<std::size_t>(embeddings.rows()) != n) throw ShapeError("train_head: embeddings and labels differ in length");
    const std::size_t pos = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), 1));
    if (pos == 0 || pos == n) throw DataError("train_head: labels contain a single class");

    TrainResult result{ProjectionHead::init(static_cast<std::size_t>(embeddings.cols()), config,
                                            derive_seed(config.seed, {seed_tag::head_init})),
                       {}};
    AdamState optimizer(result.head.net());

    std::vector<std::size_t> order(n);
    ProjectionHead::Cache cache;
    for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        Rng rng(derive_seed(config.seed, {seed_tag::epoch_shuffle, epoch}));
        std::shuffle(order.begin(), order.end(), rng);

        double epoch_loss = 0.0;
        std::size_t epoch_pairs = 0;
        for (std::size_t start = 0; start < n; start += config.batch_size) {
            const std::size_t stop = std::min(n, start + config.batch_size);
            if (stop - start < 2) break;
            const std::span<const std::size_t> rows(order.data() + start, stop - start);
            const Matrix batch = gather_rows(embeddings, rows);
            const Labels batch_labels = gather_labels(labels, rows);
            const PairBatch pairs = build_pairs(batch_labels, config.include_self_pairs);

            const Matrix projected = result.head.forward(batch, cache);
            LossResult lr = contrastive_loss(projected, pairs, config.temperature, config.balanced_pairs);
            if (!std::isfinite(lr.loss)) throw DivergenceError("train_head: non-finite loss in epoch " + std::to_string(epoch));
            epoch_loss += lr.unweighted_loss;
            epoch_pairs += pairs.size();

            const ParamGradients grads = result.head.backward(cache, lr.gradient);
            optimizer.step(result.head.net(), grads, config.learning_rate);
        }
        result.epoch_losses.push_back(epoch_pairs ? epoch_loss / static_cast<double>(epoch_pairs) : 0.0);
    }
    return result;
}

}  // namespace embadapt
