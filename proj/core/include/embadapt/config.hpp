#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>

namespace embadapt {

/// Contrastive training hyperparameters. Defaults: learning rate 1e-3,
/// minibatch 128, 10 epochs, temperature 0.1, one hidden layer, projection
/// size 128.
struct TrainConfig {
    double learning_rate = 1e-3;
    std::size_t batch_size = 128;
    std::size_t epochs = 10;
    double temperature = 0.1;
    std::size_t hidden_layers = 1;
    /// Width of every hidden layer; unset means 2 * projection_size.
    std::optional<std::size_t> hidden_width;
    std::size_t projection_size = 128;
    /// Include (i, i) pairs in each minibatch's pair set.
    bool include_self_pairs = true;
    /// L2-normalize head outputs, making the logit a scaled cosine similarity.
    bool normalize_outputs = true;
    /// Weight each pair by 1 / frequency of its same/different indicator in the batch.
    bool balanced_pairs = false;
    std::uint64_t seed = 0;

    std::size_t resolved_hidden_width() const { return hidden_width.value_or(2 * projection_size); }

    /// Throws std::invalid_argument when a field is out of range.
    void validate() const;
};

}  // namespace embadapt
