#pragma once

#include "embadapt/config.hpp"
#include "embadapt/matrix.hpp"
#include "embadapt/projection_head.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace embadapt {

struct ContrastivePair {
    std::uint32_t u;
    std::uint32_t v;   // v <= u
    std::uint8_t same; // 1 iff labels[u] == labels[v]

    friend bool operator==(const ContrastivePair&, const ContrastivePair&) = default;
};

/// Pair set of one minibatch, ordered lexicographically by (u, v).
struct PairBatch {
    std::vector<ContrastivePair> pairs;

    std::size_t size() const noexcept { return pairs.size(); }
};

/// All (u, v) with v <= u (v < u without self pairs) over a batch of B >= 2
/// labels: B(B+1)/2 or B(B-1)/2 pairs. Throws std::invalid_argument if B < 2.
PairBatch build_pairs(std::span<const int> batch_labels, bool include_self_pairs);

/// <pu, pv> / tau.
double pair_logit(std::span<const double> pu, std::span<const double> pv, double tau);

/// log(1 + exp(s)) without overflow.
double softplus(double s);

double sigmoid(double s);

struct LossResult {
    double loss = 0.0;            // summed over pairs (weighted when balanced)
    double unweighted_loss = 0.0; // summed over pairs, every weight 1
    Matrix gradient;              // d loss / d projections, same shape as projections
};

/// Binary cross-entropy over pairs with sigmoid on the logit s = <g_u, g_v> / tau:
///   loss = sum_pairs w * (softplus(s) - same * s)
/// which equals -[same * log sigma(s) + (1 - same) * log(1 - sigma(s))].
/// Weights are 1, or 1 / frequency of the pair's indicator when `balanced`.
/// Throws std::invalid_argument on an empty pair set or out-of-range index.
LossResult contrastive_loss(const Matrix& projections, const PairBatch& pairs, double tau, bool balanced = false);

struct TrainResult {
    ProjectionHead head;
    /// Mean per-pair loss of each epoch (unweighted by balancing).
    std::vector<double> epoch_losses;
};

/// Trains a freshly initialized head (seeded by config.seed) on (embeddings,
/// labels). Each epoch shuffles rows with an epoch-derived seed, walks
/// minibatches of config.batch_size (a trailing batch is kept when it has at
/// least two rows), and takes one Adam step per batch on the summed pair loss.
///
/// Throws DataError on single-class labels and DivergenceError when a loss
/// or gradient becomes non-finite.
TrainResult train_head(const EmbeddingMatrix& embeddings, std::span<const int> labels, const TrainConfig& config);

}  // namespace embadapt
