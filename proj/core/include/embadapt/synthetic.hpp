#pragma once

#include "embadapt/dataset.hpp"

#include <cstdint>
#include <vector>

namespace embadapt {

enum class Nonlinearity {
    /// Signal coordinates are offset * (y - 1/2) plus noise.
    none,
    /// Signal coordinates come in pairs (a, b) with sign(a) * sign(b) = 2y - 1,
    /// so no single coordinate and no linear function carries the label. The
    /// whole modality vector is then rotated by a random orthogonal matrix.
    xor_rotate,
};

/// Parameters of the synthetic multimodal generator.
///
/// Each modality row is [signal block | noise block]. The signal block has
/// signal_dims[j] coordinates and noise of standard deviation
/// noise_sigma * signal_noise_ratio; the noise block is N(0, noise_sigma^2).
/// With xor_rotate the per-coordinate signal variance is (offset/2)^2 and the
/// signal covariance is isotropic, so choosing noise_sigma^2 above that makes
/// the signal invisible to variance-seeking projections.
struct SynthSpec {
    std::size_t n_samples = 2000;
    std::size_t n_modalities = 2;
    std::vector<std::size_t> dims = {256, 128};
    std::vector<std::size_t> signal_dims = {32, 32};
    double noise_sigma = 1.0;
    double class_balance = 0.5;
    Nonlinearity nonlinearity = Nonlinearity::xor_rotate;
    std::uint64_t seed = 7;
    double signal_offset = 2.0;
    double signal_noise_ratio = 0.25;

    /// Throws std::invalid_argument on violated invariants.
    void validate() const;
};

/// Generated dataset plus the pre-rotation signal blocks and the rotations,
/// for tests that need the generating coordinates.
struct SyntheticDraw {
    MultimodalDataset data;
    std::vector<EmbeddingMatrix> latent_signal;
    std::vector<Matrix> rotations;
};

/// Labels: exactly round(class_balance * n) positives (clamped to [1, n-1]),
/// randomly placed. Ids are "s000000", "s000001", ...; modalities "m0", "m1", ...
SyntheticDraw draw_synthetic(const SynthSpec& spec);

MultimodalDataset generate_synthetic(const SynthSpec& spec);

}  // namespace embadapt
